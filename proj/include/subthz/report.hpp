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


#ifndef SUBTHZ_REPORT_HPP_
#define SUBTHZ_REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "subthz/angular.hpp"
#include "subthz/delay.hpp"
#include "subthz/io.hpp"
#include "subthz/pathloss.hpp"
#include "subthz/xpd.hpp"

namespace subthz {

struct RunConfig {
    std::filesystem::path manifest;
    std::vector<double> thresholds_db{20.0, 30.0};
    std::optional<double> carrier_hz;  // manifest value when unset
    std::filesystem::path out_dir = "report";
    std::uint64_t seed = 0;
    bool emit_csv = true;
    bool emit_json = true;
    bool los_only_fits = true;
    double delay_resolution_ns = 2.0;

    void validate() const {
        if (thresholds_db.empty()) throw validation_error("threshold_db", "at least one threshold required");
        for (double t : thresholds_db)
            if (!(t > 0.0)) throw validation_error("threshold_db", "thresholds must be > 0");
        if (carrier_hz && !(*carrier_hz > 0.0)) throw validation_error("carrier_hz", "must be > 0");
        if (!emit_csv && !emit_json) throw validation_error("format", "no report format selected");
    }
};

// File name -> content. Ordered so the bundle serialises canonically.
using ReportBundle = std::map<std::string, std::string>;

inline std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

inline std::string threshold_label(double t) { return detail::format_double(t) + " dB"; }

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw io_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

namespace detail {

inline std::string summary_row(const std::string &label, const Summary &s) {
    return label + "," + fixed4(s.min) + "," + fixed4(s.max) + "," + fixed4(s.mean) + "," + fixed4(s.median) + "," +
           fixed4(s.p90) + "\n";
}

inline nlohmann::json summary_json(const Summary &s) {
    return {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"median", s.median}, {"p90", s.p90}, {"n", s.n}};
}

inline bool by_ids(const LocationMeasurement &a, const LocationMeasurement &b) {
    return std::tie(a.tx_id, a.rx_id) < std::tie(b.tx_id, b.rx_id);
}

}  // namespace detail

// Delay table layout: Omni RMSDS, Omni MDS, Dir RMSDS, Dir MDS; one row per threshold.
inline std::string format_delay_table(const std::vector<DelaySummary> &rows) {
    std::string out = "Delay Spread (ns),Min,Max,Mean,Median,90%\n";
    auto block = [&](const char *name, Summary DelaySummary::*field) {
        for (const auto &r : rows) out += detail::summary_row(std::string(name) + "-" + threshold_label(r.threshold_db), r.*field);
    };
    block("Omni RMSDS", &DelaySummary::omni_rmsds);
    block("Omni MDS", &DelaySummary::omni_mds);
    block("Dir RMSDS", &DelaySummary::dir_rmsds);
    block("Dir MDS", &DelaySummary::dir_mds);
    return out;
}

// Angular table layout: lobe counts then RMS angular spreads, AOA before AOD.
inline std::string format_angular_table(const std::vector<AngularSummary> &rows) {
    std::string out = "Angular Spread (deg),Min,Max,Mean,Median,90%\n";
    auto block = [&](const char *name, Summary AngularSummary::*field) {
        for (const auto &r : rows) out += detail::summary_row(std::string(name) + "-" + threshold_label(r.threshold_db), r.*field);
    };
    block("# AOA SL", &AngularSummary::aoa_lobes);
    block("# AOD SL", &AngularSummary::aod_lobes);
    block("AOA RMSAS", &AngularSummary::aoa_rmsas);
    block("AOD RMSAS", &AngularSummary::aod_rmsas);
    return out;
}

inline std::string format_pas_csv(const PowerAngularSpectrum &pas) {
    std::string out = "bin_deg,power_db\n";
    for (std::size_t i = 0; i < pas.size(); ++i)
        if (pas.powers_mw[i] > 0.0) out += fixed4(pas.bins_deg[i]) + "," + fixed4(linear_to_db(pas.powers_mw[i])) + "\n";
    return out;
}

inline std::string format_scatter_csv(std::span<const PathLossSample> samples) {
    std::string out = "distance_m,pl_db\n";
    for (const auto &s : samples) out += fixed4(s.distance_m) + "," + fixed4(s.pl_db) + "\n";
    return out;
}

inline std::string format_xpd_cdf_csv(const XpdClassSummary &s) {
    std::string out = "xpd_db,cdf\n";
    for (const auto &[x, p] : s.cdf) out += fixed4(x) + "," + fixed4(p) + "\n";
    return out;
}

inline nlohmann::json ci_json(const CiFit &f) {
    return {{"ple", f.ple}, {"sigma_db", f.sigma_db}, {"n_samples", f.n_samples}, {"fspl_anchor_db", f.fspl_anchor_db}};
}

inline nlohmann::json xpd_summary_json(const std::vector<XpdClassSummary> &summary) {
    auto arr = nlohmann::json::array();
    for (const auto &s : summary)
        arr.push_back({{"class", std::string(to_string(s.path_class))}, {"mean_db", s.mean_db}, {"std_db", s.std_db}, {"n", s.n}});
    return arr;
}

// Locations split by polarisation, each sorted by (tx_id, rx_id).
struct PolarizationSplit {
    std::vector<LocationMeasurement> vv;
    std::vector<LocationMeasurement> vh;
};

inline PolarizationSplit split_by_polarization(const Campaign &c) {
    PolarizationSplit s;
    for (const auto &loc : c.locations) (loc.polarization == Polarization::VV ? s.vv : s.vh).push_back(loc);
    std::sort(s.vv.begin(), s.vv.end(), detail::by_ids);
    std::sort(s.vh.begin(), s.vh.end(), detail::by_ids);
    return s;
}

// Path-loss samples of one polarisation and kind; locations without
// detectable power are skipped and reported through `excluded`.
inline std::vector<PathLossSample> path_loss_samples(std::span<const LocationMeasurement> locs, PathKind kind,
                                                     bool los_only, std::vector<std::string> *excluded = nullptr,
                                                     double delay_resolution_ns = 2.0) {
    std::vector<PathLossSample> out;
    for (const auto &loc : locs) {
        if (los_only && !loc.los) continue;
        if (kind == PathKind::Omni) {
            if (!loc.has_signal()) {
                if (excluded) excluded->push_back(loc.tx_id + "-" + loc.rx_id + ":" + std::string(to_string(loc.polarization)));
                continue;
            }
            out.push_back(omni_path_loss(loc, delay_resolution_ns));
        } else {
            for (auto &s : directional_path_loss(loc))
                if (s.kind == kind) out.push_back(std::move(s));
        }
    }
    return out;
}

// All V-V/V-H directional XPDs, pairing records by (tx_id, rx_id).
inline std::vector<DirectionalXpd> campaign_directional_xpd(const PolarizationSplit &split) {
    std::vector<DirectionalXpd> out;
    for (const auto &vv : split.vv) {
        auto it = std::find_if(split.vh.begin(), split.vh.end(),
                               [&](const LocationMeasurement &l) { return l.tx_id == vv.tx_id && l.rx_id == vv.rx_id; });
        if (it == split.vh.end()) continue;
        auto x = directional_xpd(vv, *it);
        out.insert(out.end(), x.begin(), x.end());
    }
    return out;
}

// Manifest plus every sweep file it references, manifest first.
inline std::vector<std::filesystem::path> campaign_source_files(const std::filesystem::path &manifest) {
    std::vector<std::filesystem::path> files{manifest};
    const auto root = nlohmann::json::parse(detail::read_file(manifest));
    for (const auto &l : root.at("locations")) files.push_back(manifest.parent_path() / l.at("sweeps").get<std::string>());
    return files;
}

// Full analysis: omni/directional path loss and CI/CIX fits, delay and angular
// summaries per threshold, directional XPD. Pure in (campaign, config,
// input digests); the returned bundle holds no timestamps.
inline ReportBundle build_report(const Campaign &campaign, const RunConfig &cfg,
                                 const std::vector<std::pair<std::string, std::string>> &input_digests = {}) {
    cfg.validate();
    const double f = cfg.carrier_hz.value_or(campaign.carrier_hz);
    const auto split = split_by_polarization(campaign);
    if (split.vv.empty()) throw validation_error("locations", "campaign has no V-V location");

    nlohmann::json j;
    j["config"] = {{"manifest", cfg.manifest.filename().string()},
                   {"thresholds_db", cfg.thresholds_db},
                   {"carrier_hz", f},
                   {"seed", cfg.seed},
                   {"los_only_fits", cfg.los_only_fits},
                   {"delay_resolution_ns", cfg.delay_resolution_ns},
                   {"formats", [&] {
                        auto a = nlohmann::json::array();
                        if (cfg.emit_csv) a.push_back("csv");
                        if (cfg.emit_json) a.push_back("json");
                        return a;
                    }()}};
    j["inputs"] = nlohmann::json::array();
    for (const auto &[name, digest] : input_digests) j["inputs"].push_back({{"file", name}, {"sha256", digest}});
    j["campaign_id"] = campaign.campaign_id;
    j["n_locations"] = {{"VV", split.vv.size()}, {"VH", split.vh.size()}};

    ReportBundle bundle;

    // Path loss.
    std::vector<std::string> excluded;
    const auto vv_omni = path_loss_samples(split.vv, PathKind::Omni, cfg.los_only_fits, &excluded, cfg.delay_resolution_ns);
    const auto vh_omni = path_loss_samples(split.vh, PathKind::Omni, cfg.los_only_fits, &excluded, cfg.delay_resolution_ns);
    const auto ci_vv = fit_ci(vv_omni, f);
    nlohmann::json pl;
    pl["omni"]["VV"] = ci_json(ci_vv);
    pl["excluded_no_power"] = excluded;
    if (vh_omni.size() >= 2) pl["omni"]["VH"] = ci_json(fit_ci(vh_omni, f));
    else pl["omni"]["VH"] = nullptr;
    if (!vh_omni.empty()) {
        const auto cix = fit_cix(vh_omni, ci_vv, f);
        pl["omni"]["CIX"] = {{"xpd_db", cix.xpd_db}, {"sigma_db", cix.sigma_db}, {"ple_vv", cix.ple_vv}, {"n_samples", cix.n_samples}};
    } else {
        pl["omni"]["CIX"] = nullptr;
    }
    std::vector<PathLossSample> scatter(vv_omni);
    scatter.insert(scatter.end(), vh_omni.begin(), vh_omni.end());
    for (PathKind kind : {PathKind::DirB, PathKind::DirNBB, PathKind::DirNB}) {
        const auto samples = path_loss_samples(split.vv, kind, cfg.los_only_fits);
        const std::string key(to_string(kind));
        try {
            pl["directional"]["VV"][key] = ci_json(fit_ci(samples, f));
        } catch (const degenerate_fit_error &) {
            pl["directional"]["VV"][key] = nullptr;
        }
        scatter.insert(scatter.end(), samples.begin(), samples.end());
    }
    j["pathloss"] = pl;

    // Delay and angular tables (V-V only).
    std::vector<LocationMeasurement> vv_live;
    for (const auto &l : split.vv)
        if (l.has_signal()) vv_live.push_back(l);
    std::vector<DelaySummary> delay_rows;
    std::vector<AngularSummary> angular_rows;
    for (double t : cfg.thresholds_db) {
        delay_rows.push_back(campaign_delay_summary(vv_live, t, cfg.delay_resolution_ns));
        angular_rows.push_back(campaign_angular_summary(vv_live, t));
    }
    for (const auto &r : delay_rows)
        j["delay"].push_back({{"threshold_db", r.threshold_db},
                              {"omni_rmsds_ns", detail::summary_json(r.omni_rmsds)},
                              {"omni_mds_ns", detail::summary_json(r.omni_mds)},
                              {"dir_rmsds_ns", detail::summary_json(r.dir_rmsds)},
                              {"dir_mds_ns", detail::summary_json(r.dir_mds)}});
    for (const auto &r : angular_rows)
        j["angular"].push_back({{"threshold_db", r.threshold_db},
                                {"aoa_lobes", detail::summary_json(r.aoa_lobes)},
                                {"aod_lobes", detail::summary_json(r.aod_lobes)},
                                {"aoa_rmsas_deg", detail::summary_json(r.aoa_rmsas)},
                                {"aod_rmsas_deg", detail::summary_json(r.aod_rmsas)}});

    // XPD.
    const auto xpds = campaign_directional_xpd(split);
    const auto xsum = xpd_summary(xpds);
    j["xpd"] = xpd_summary_json(xsum);

    if (cfg.emit_csv) {
        bundle["table_delay.csv"] = format_delay_table(delay_rows);
        bundle["table_angular.csv"] = format_angular_table(angular_rows);
        std::string sc = "tx_id,rx_id,polarization,kind,los,distance_m,pl_db\n";
        for (const auto &s : scatter)
            sc += s.tx_id + "," + s.rx_id + "," + std::string(to_string(s.polarization)) + "," +
                  std::string(to_string(s.kind)) + "," + (s.los ? "1" : "0") + "," + fixed4(s.distance_m) + "," +
                  fixed4(s.pl_db) + "\n";
        bundle["pathloss_scatter.csv"] = sc;
        for (const auto &s : xsum) bundle["xpd_" + std::string(to_string(s.path_class)) + ".csv"] = format_xpd_cdf_csv(s);
    }
    if (cfg.emit_json) bundle["report.json"] = j.dump(2) + "\n";
    return bundle;
}

inline void write_bundle(const ReportBundle &bundle, const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
    for (const auto &[name, content] : bundle) detail::write_file(dir / name, content);
}

// ingest -> analyse -> write. Throws the library error types on failure.
inline ReportBundle run_pipeline(const RunConfig &cfg) {
    cfg.validate();
    const auto campaign = ingest_campaign(cfg.manifest, cfg.delay_resolution_ns);
    std::vector<std::pair<std::string, std::string>> digests;
    for (const auto &p : campaign_source_files(cfg.manifest))
        digests.emplace_back(p.filename().string(), sha256_hex(detail::read_file(p)));
    auto bundle = build_report(campaign, cfg, digests);
    write_bundle(bundle, cfg.out_dir);
    return bundle;
}

}  // namespace subthz

#endif  // SUBTHZ_REPORT_HPP_
