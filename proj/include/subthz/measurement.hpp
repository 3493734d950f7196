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


#ifndef SUBTHZ_MEASUREMENT_HPP_
#define SUBTHZ_MEASUREMENT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "subthz/common.hpp"

namespace subthz {

struct AntennaConfig {
    double gain_dbi = 27.0;
    double hpbw_deg = 8.0;
    double az_step_deg = 8.0;
    double height_m = 1.5;

    static AntennaConfig tx_default() { return {27.0, 8.0, 8.0, 3.0}; }
    static AntennaConfig rx_default() { return {27.0, 8.0, 8.0, 1.5}; }

    // Number of pointing positions in one full azimuth sweep.
    std::size_t sweep_size() const { return static_cast<std::size_t>(std::lround(360.0 / az_step_deg)); }

    void validate(std::string_view who = "antenna") const {
        const std::string p(who);
        if (!(gain_dbi > 0.0)) throw validation_error(p + ".gain_dbi", "must be > 0");
        if (!(hpbw_deg > 0.0)) throw validation_error(p + ".hpbw_deg", "must be > 0");
        if (!(az_step_deg >= hpbw_deg)) throw validation_error(p + ".az_step_deg", "must be >= hpbw_deg");
        if (!(az_step_deg <= 360.0)) throw validation_error(p + ".az_step_deg", "must be <= 360");
        const double k = 360.0 / az_step_deg;
        if (std::abs(k - std::round(k)) > 1e-9) throw validation_error(p + ".az_step_deg", "must divide 360");
    }

    friend bool operator==(const AntennaConfig &, const AntennaConfig &) = default;
};

enum class Polarization { VV, VH };

inline std::string_view to_string(Polarization p) { return p == Polarization::VV ? "VV" : "VH"; }

inline Polarization parse_polarization(std::string_view s) {
    if (s == "VV") return Polarization::VV;
    if (s == "VH") return Polarization::VH;
    throw validation_error("polarization", "expected \"VV\" or \"VH\", got \"" + std::string(s) + "\"");
}

// (TX azimuth, RX azimuth) pointing pair, degrees.
struct Direction {
    double tx_az_deg = 0.0;
    double rx_az_deg = 0.0;
    friend auto operator<=>(const Direction &, const Direction &) = default;
};

struct DirectionalPdp {
    double tx_az_deg = 0.0;
    double rx_az_deg = 0.0;
    std::vector<double> delays_ns;
    std::vector<double> powers_db;
    double noise_floor_db = -200.0;

    Direction direction() const { return {tx_az_deg, rx_az_deg}; }

    double peak_db() const {
        if (powers_db.empty()) throw validation_error("powers_db", "empty PDP");
        return *std::max_element(powers_db.begin(), powers_db.end());
    }

    // A direction carries "valid signal power" when its peak clears the noise floor.
    bool detectable() const { return !powers_db.empty() && peak_db() > noise_floor_db; }

    friend bool operator==(const DirectionalPdp &, const DirectionalPdp &) = default;
};

// Checks a PDP as recorded by the sounder: contiguous uniform delay grid.
inline void validate_raw_pdp(const DirectionalPdp &pdp, double delay_resolution_ns = 2.0) {
    auto angle_ok = [](double a) { return std::isfinite(a) && a >= 0.0 && a < 360.0; };
    if (!angle_ok(pdp.tx_az_deg)) throw validation_error("tx_az_deg", "must lie in [0,360)");
    if (!angle_ok(pdp.rx_az_deg)) throw validation_error("rx_az_deg", "must lie in [0,360)");
    if (pdp.delays_ns.empty()) throw validation_error("delays_ns", "empty PDP");
    if (pdp.delays_ns.size() != pdp.powers_db.size())
        throw validation_error("powers_db", "length differs from delays_ns");
    for (double p : pdp.powers_db)
        if (!std::isfinite(p)) throw validation_error("powers_db", "non-finite power");
    if (!std::isfinite(pdp.noise_floor_db)) throw validation_error("noise_floor_db", "non-finite");
    const double tol = 1e-6 * delay_resolution_ns;
    for (std::size_t i = 1; i < pdp.delays_ns.size(); ++i) {
        const double step = pdp.delays_ns[i] - pdp.delays_ns[i - 1];
        if (!(step > 0.0)) throw validation_error("delays_ns", "not strictly increasing");
        if (std::abs(step - delay_resolution_ns) > tol)
            throw validation_error("delays_ns", "non-uniform delay grid (step " + std::to_string(step) +
                                                    " ns, expected " + std::to_string(delay_resolution_ns) + " ns)");
    }
}

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    friend bool operator==(const Position &, const Position &) = default;
};

inline double distance_between(const Position &a, const Position &b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

// Horizontal bearing from `from` towards `to`, degrees in [0,360), counter-clockwise from +x.
inline double bearing_deg(const Position &from, const Position &to) {
    return wrap_360(rad_to_deg(std::atan2(to.y - from.y, to.x - from.x)));
}

struct LocationMeasurement {
    std::string tx_id;
    std::string rx_id;
    Position tx_pos_m;
    Position rx_pos_m;
    Polarization polarization = Polarization::VV;
    bool los = true;
    std::vector<DirectionalPdp> sweeps;
    AntennaConfig tx_antenna = AntennaConfig::tx_default();
    AntennaConfig rx_antenna = AntennaConfig::rx_default();
    double tx_power_dbm = 0.0;

    double distance_m() const { return distance_between(tx_pos_m, rx_pos_m); }
    double los_bearing_tx_deg() const { return bearing_deg(tx_pos_m, rx_pos_m); }
    double los_bearing_rx_deg() const { return bearing_deg(rx_pos_m, tx_pos_m); }

    bool has_signal() const {
        return std::any_of(sweeps.begin(), sweeps.end(), [](const DirectionalPdp &p) { return p.detectable(); });
    }

    friend bool operator==(const LocationMeasurement &, const LocationMeasurement &) = default;
};

inline void validate_location(const LocationMeasurement &loc, double delay_resolution_ns = 2.0) {
    if (loc.tx_id.empty()) throw validation_error("tx_id", "empty identifier");
    if (loc.rx_id.empty()) throw validation_error("rx_id", "empty identifier");
    loc.tx_antenna.validate("tx_antenna");
    loc.rx_antenna.validate("rx_antenna");
    if (!std::isfinite(loc.tx_power_dbm)) throw validation_error("tx_power_dbm", "non-finite");
    const double d = loc.distance_m();
    if (!(d > kReferenceDistanceM))
        throw validation_error("tx_pos_m/rx_pos_m", "TX-RX distance " + std::to_string(d) + " m not above d0 = 1 m");
    std::set<Direction> seen;
    for (const auto &s : loc.sweeps) {
        validate_raw_pdp(s, delay_resolution_ns);
        if (!seen.insert(s.direction()).second)
            throw validation_error("sweeps", "duplicate pointing pair (" + std::to_string(s.tx_az_deg) + ", " +
                                                 std::to_string(s.rx_az_deg) + ")");
    }
}

struct AnalysisConfig {
    double threshold_db = 30.0;
    double carrier_hz = 142e9;
    double max_measurable_pl_db = 152.0;
    double d0_m = kReferenceDistanceM;
    double delay_resolution_ns = 2.0;

    void validate() const {
        if (!(threshold_db > 0.0)) throw validation_error("threshold_db", "must be > 0");
        if (!(carrier_hz > 0.0)) throw validation_error("carrier_hz", "must be > 0");
        if (d0_m != kReferenceDistanceM) throw validation_error("d0_m", "fixed at 1 m");
        if (!(delay_resolution_ns > 0.0)) throw validation_error("delay_resolution_ns", "must be > 0");
    }
};

// Drops every bin below (peak - threshold_db) or below the noise floor. The
// peak bin always survives; absent bins are omitted, not flagged.
inline DirectionalPdp threshold_pdp(const DirectionalPdp &pdp, double threshold_db) {
    if (!(threshold_db > 0.0)) throw validation_error("threshold_db", "must be > 0");
    if (pdp.powers_db.empty()) throw validation_error("powers_db", "empty PDP");
    const auto peak_it = std::max_element(pdp.powers_db.begin(), pdp.powers_db.end());
    const double peak = *peak_it;
    if (peak <= pdp.noise_floor_db) throw no_signal_error("no detectable signal: PDP peak at or below noise floor");
    const auto peak_idx = static_cast<std::size_t>(peak_it - pdp.powers_db.begin());
    const double cut = peak - threshold_db;

    DirectionalPdp out;
    out.tx_az_deg = pdp.tx_az_deg;
    out.rx_az_deg = pdp.rx_az_deg;
    out.noise_floor_db = pdp.noise_floor_db;
    for (std::size_t i = 0; i < pdp.powers_db.size(); ++i) {
        const double p = pdp.powers_db[i];
        if (i == peak_idx || (p >= cut && p >= pdp.noise_floor_db)) {
            out.delays_ns.push_back(pdp.delays_ns[i]);
            out.powers_db.push_back(p);
        }
    }
    return out;
}

}  // namespace subthz

#endif  // SUBTHZ_MEASUREMENT_HPP_
