// SPDX-License-Identifier: Apache-2.0
//
// subthz-chan: sub-THz channel measurement post-processing and drop synthesis
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef SUBTHZ_IO_HPP_
#define SUBTHZ_IO_HPP_

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "subthz/measurement.hpp"

namespace subthz {

// One measurement campaign: a JSON manifest plus one sweep CSV per location.
struct Campaign {
    std::string campaign_id;
    double carrier_hz = 142e9;
    double tx_power_dbm = 0.0;
    std::vector<LocationMeasurement> locations;

    friend bool operator==(const Campaign &, const Campaign &) = default;
};

inline constexpr std::string_view kSweepHeader = "tx_az_deg,rx_az_deg,delay_ns,power_db";

namespace detail {

inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw io_error("cannot format number");
    return std::string(buf.data(), end);
}

inline std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path &path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace detail

// Parses a sweep CSV. Rows for one pointing pair must be contiguous; a pair
// reappearing later is reported as a duplicate.
inline std::vector<DirectionalPdp> parse_sweep_csv(std::string_view text, const std::string &file_name = "<sweep>") {
    std::vector<DirectionalPdp> sweeps;
    std::optional<double> noise_floor;
    bool header_seen = false;
    std::set<Direction> closed;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        if (line.front() == '#') {
            std::string_view body = line.substr(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            constexpr std::string_view key = "noise_floor_db=";
            if (body.substr(0, key.size()) == key) {
                if (noise_floor) throw parse_error(file_name, line_no, "noise_floor_db given more than once");
                auto v = detail::parse_double(body.substr(key.size()));
                if (!v) throw parse_error(file_name, line_no, "bad noise_floor_db value");
                noise_floor = *v;
            }
            continue;
        }

        if (!header_seen) {
            if (line != kSweepHeader)
                throw parse_error(file_name, line_no, "expected header \"" + std::string(kSweepHeader) + "\"");
            header_seen = true;
            continue;
        }

        std::array<double, 4> f{};
        std::size_t start = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const std::size_t comma = line.find(',', start);
            const bool last = (k == 3);
            if (last != (comma == std::string_view::npos))
                throw parse_error(file_name, line_no, "expected 4 comma-separated fields");
            auto v = detail::parse_double(line.substr(start, last ? std::string_view::npos : comma - start));
            if (!v) throw parse_error(file_name, line_no, "field " + std::to_string(k + 1) + " is not a number");
            f[k] = *v;
            start = comma + 1;
        }

        const Direction dir{f[0], f[1]};
        if (sweeps.empty() || sweeps.back().direction() != dir) {
            if (!sweeps.empty()) closed.insert(sweeps.back().direction());
            if (closed.count(dir))
                throw parse_error(file_name, line_no, "duplicate pointing pair (rows for a pair must be contiguous)");
            DirectionalPdp pdp;
            pdp.tx_az_deg = dir.tx_az_deg;
            pdp.rx_az_deg = dir.rx_az_deg;
            sweeps.push_back(std::move(pdp));
        }
        sweeps.back().delays_ns.push_back(f[2]);
        sweeps.back().powers_db.push_back(f[3]);
    }

    if (!header_seen) throw parse_error(file_name, line_no, "missing header line");
    if (!noise_floor) throw parse_error(file_name, 1, "missing '# noise_floor_db=<v>' line");
    for (auto &s : sweeps) s.noise_floor_db = *noise_floor;
    return sweeps;
}

// Inverse of parse_sweep_csv. All sweeps must share one noise floor.
inline std::string format_sweep_csv(const std::vector<DirectionalPdp> &sweeps, double noise_floor_db) {
    std::string out;
    out += "# noise_floor_db=" + detail::format_double(noise_floor_db) + "\n";
    out += kSweepHeader;
    out += '\n';
    for (const auto &s : sweeps) {
        if (s.noise_floor_db != noise_floor_db)
            throw validation_error("noise_floor_db", "sweeps of one location must share a noise floor");
        const std::string prefix = detail::format_double(s.tx_az_deg) + "," + detail::format_double(s.rx_az_deg) + ",";
        for (std::size_t i = 0; i < s.delays_ns.size(); ++i) {
            out += prefix;
            out += detail::format_double(s.delays_ns[i]);
            out += ',';
            out += detail::format_double(s.powers_db[i]);
            out += '\n';
        }
    }
    return out;
}

namespace detail {

inline Position position_from_json(const nlohmann::json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 3) throw validation_error(field, "expected [x,y,z]");
    for (const auto &v : j)
        if (!v.is_number()) throw validation_error(field, "coordinates must be numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::json position_to_json(const Position &p) { return nlohmann::json::array({p.x, p.y, p.z}); }

template <typename T>
T required(const nlohmann::json &obj, const char *key, const std::string &where) {
    if (!obj.contains(key)) throw validation_error(where + key, "missing");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw validation_error(where + key, "wrong type");
    }
}

inline AntennaConfig antenna_from_json(const nlohmann::json &j, const std::string &where, double height) {
    AntennaConfig a;
    a.gain_dbi = required<double>(j, "gain_dbi", where);
    a.hpbw_deg = required<double>(j, "hpbw_deg", where);
    a.az_step_deg = required<double>(j, "az_step_deg", where);
    a.height_m = height;
    return a;
}

inline nlohmann::json antenna_to_json(const AntennaConfig &a) {
    return {{"gain_dbi", a.gain_dbi}, {"hpbw_deg", a.hpbw_deg}, {"az_step_deg", a.az_step_deg}};
}

inline std::string sweep_file_name(const LocationMeasurement &loc) {
    return loc.tx_id + "_" + loc.rx_id + "_" + std::string(to_string(loc.polarization)) + ".csv";
}

}  // namespace detail

// Reads and validates a campaign manifest together with every referenced
// sweep file. Sweep paths resolve relative to the manifest directory.
inline Campaign ingest_campaign(const std::filesystem::path &manifest_path, double delay_resolution_ns = 2.0) {
    const std::string manifest_name = manifest_path.string();
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(detail::read_file(manifest_path));
    } catch (const nlohmann::json::parse_error &e) {
        // nlohmann reports a byte offset; turn it into a line number.
        const std::string text = detail::read_file(manifest_path);
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
        throw parse_error(manifest_name, line, e.what());
    }
    if (!root.is_object()) throw parse_error(manifest_name, 1, "manifest root must be an object");

    Campaign c;
    c.campaign_id = detail::required<std::string>(root, "campaign_id", "");
    c.carrier_hz = detail::required<double>(root, "carrier_hz", "");
    c.tx_power_dbm = detail::required<double>(root, "tx_power_dbm", "");
    if (!(c.carrier_hz > 0.0)) throw validation_error("carrier_hz", "must be > 0");
    if (!root.contains("locations") || !root["locations"].is_array())
        throw validation_error("locations", "missing or not an array");

    const auto base = manifest_path.parent_path();
    std::size_t idx = 0;
    for (const auto &jl : root["locations"]) {
        const std::string where = "locations[" + std::to_string(idx++) + "].";
        if (!jl.is_object()) throw validation_error(where.substr(0, where.size() - 1), "expected object");
        LocationMeasurement loc;
        loc.tx_id = detail::required<std::string>(jl, "tx_id", where);
        loc.rx_id = detail::required<std::string>(jl, "rx_id", where);
        if (!jl.contains("tx_pos_m")) throw validation_error(where + "tx_pos_m", "missing");
        if (!jl.contains("rx_pos_m")) throw validation_error(where + "rx_pos_m", "missing");
        loc.tx_pos_m = detail::position_from_json(jl["tx_pos_m"], where + "tx_pos_m");
        loc.rx_pos_m = detail::position_from_json(jl["rx_pos_m"], where + "rx_pos_m");
        loc.polarization = parse_polarization(detail::required<std::string>(jl, "polarization", where));
        loc.los = detail::required<bool>(jl, "los", where);
        if (!jl.contains("antenna")) throw validation_error(where + "antenna", "missing");
        const auto shared = jl["antenna"];
        loc.tx_antenna = detail::antenna_from_json(jl.value("tx_antenna", shared), where + "antenna.", loc.tx_pos_m.z);
        loc.rx_antenna = detail::antenna_from_json(jl.value("rx_antenna", shared), where + "antenna.", loc.rx_pos_m.z);
        loc.tx_power_dbm = jl.value("tx_power_dbm", c.tx_power_dbm);

        const auto sweep_rel = detail::required<std::string>(jl, "sweeps", where);
        const auto sweep_path = base / sweep_rel;
        loc.sweeps = parse_sweep_csv(detail::read_file(sweep_path), sweep_path.string());
        try {
            validate_location(loc, delay_resolution_ns);
        } catch (const validation_error &e) {
            throw validation_error(where + e.field(), std::string(e.what()) + " [" + sweep_path.string() + "]");
        }
        c.locations.push_back(std::move(loc));
    }
    return c;
}

// Writes manifest + per-location sweep CSVs into `dir`. Returns the manifest path.
inline std::filesystem::path write_campaign(const Campaign &c, const std::filesystem::path &dir,
                                            const std::string &manifest_name = "manifest.json") {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());

    nlohmann::json root;
    root["campaign_id"] = c.campaign_id;
    root["carrier_hz"] = c.carrier_hz;
    root["tx_power_dbm"] = c.tx_power_dbm;
    root["locations"] = nlohmann::json::array();
    for (const auto &loc : c.locations) {
        nlohmann::json jl;
        jl["tx_id"] = loc.tx_id;
        jl["rx_id"] = loc.rx_id;
        jl["tx_pos_m"] = detail::position_to_json(loc.tx_pos_m);
        jl["rx_pos_m"] = detail::position_to_json(loc.rx_pos_m);
        jl["polarization"] = std::string(to_string(loc.polarization));
        jl["los"] = loc.los;
        jl["antenna"] = detail::antenna_to_json(loc.tx_antenna);
        if (detail::antenna_to_json(loc.rx_antenna) != jl["antenna"]) jl["rx_antenna"] = detail::antenna_to_json(loc.rx_antenna);
        if (loc.tx_power_dbm != c.tx_power_dbm) jl["tx_power_dbm"] = loc.tx_power_dbm;
        const std::string file = detail::sweep_file_name(loc);
        jl["sweeps"] = file;
        const double nf = loc.sweeps.empty() ? -200.0 : loc.sweeps.front().noise_floor_db;
        detail::write_file(dir / file, format_sweep_csv(loc.sweeps, nf));
        root["locations"].push_back(std::move(jl));
    }
    const auto manifest = dir / manifest_name;
    detail::write_file(manifest, root.dump(2) + "\n");
    return manifest;
}

}  // namespace subthz

#endif  // SUBTHZ_IO_HPP_
