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


// subthz-chan: command-line front end.
//
//   subthz-chan ingest        --manifest m.json
//   subthz-chan fit pathloss  --manifest m.json --pol VV|VH --kind omni|B|NBB|NB
//   subthz-chan stats delay   --manifest m.json [--threshold-db 20 --threshold-db 30]
//   subthz-chan stats angular --manifest m.json [--threshold-db ...]
//   subthz-chan pas dump      --manifest m.json --tx TX1 --rx RX2 --side AOA|AOD
//   subthz-chan xpd report    --manifest m.json [--out dir]
//   subthz-chan synth         [--params p.json] --n 13 --seed 42 --out dir
//   subthz-chan report        --manifest m.json --out dir [--format csv|json ...]
//
// Exit codes: 0 ok, 2 validation, 3 degenerate fit, 4 I/O.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "subthz/subthz.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDegenerateFit = 3;
constexpr int kExitIo = 4;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("subthz");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char *env = std::getenv("SUBTHZ_CHAN_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

void emit(const std::string &text, const std::string &out_file) {
    if (out_file.empty()) {
        std::cout << text;
        return;
    }
    const std::filesystem::path p(out_file);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    subthz::detail::write_file(p, text);
    spdlog::info("wrote {}", p.string());
}

std::vector<double> thresholds_or_default(const std::vector<double> &t) {
    return t.empty() ? std::vector<double>{20.0, 30.0} : t;
}

const subthz::LocationMeasurement &find_location(const subthz::Campaign &c, const std::string &tx, const std::string &rx,
                                                 subthz::Polarization pol) {
    for (const auto &l : c.locations)
        if (l.tx_id == tx && l.rx_id == rx && l.polarization == pol) return l;
    throw subthz::validation_error("location", "no " + std::string(subthz::to_string(pol)) + " record for " + tx + "-" + rx);
}

}  // namespace

int main(int argc, char **argv) {
    setup_logging();

    CLI::App app{"Sub-THz channel measurement analysis and drop synthesis"};
    app.require_subcommand(1);

    std::string manifest, out, pol_str = "VV", kind_str = "omni", side_str = "AOA", tx_id, rx_id, params_path;
    std::vector<double> thresholds;
    std::vector<std::string> formats;
    std::optional<double> carrier;
    std::uint64_t seed = 0;
    std::size_t n_locations = 13;
    bool all_locations = false;
    double pas_threshold = 30.0;

    auto add_manifest = [&](CLI::App *cmd) { cmd->add_option("--manifest", manifest, "Campaign manifest (JSON)")->required(); };

    auto *ingest = app.add_subcommand("ingest", "Validate a campaign and print a per-location summary");
    add_manifest(ingest);
    ingest->add_option("--out", out, "Write the summary here instead of stdout");

    auto *fit = app.add_subcommand("fit", "Path-loss model fitting");
    fit->require_subcommand(1);
    auto *fit_pl = fit->add_subcommand("pathloss", "CI fit (and CIX for V-H) of one polarisation/kind");
    add_manifest(fit_pl);
    fit_pl->add_option("--pol", pol_str, "VV or VH")->check(CLI::IsMember({"VV", "VH"}));
    fit_pl->add_option("--kind", kind_str, "omni, B, NBB or NB")->check(CLI::IsMember({"omni", "B", "NBB", "NB"}));
    fit_pl->add_option("--carrier-hz", carrier, "Override the manifest carrier");
    fit_pl->add_option("--out", out, "Directory for fit JSON and scatter CSV");
    fit_pl->add_flag("--all-locations", all_locations, "Include NLOS locations in the fit");

    auto *stats = app.add_subcommand("stats", "Campaign delay / angular statistics");
    stats->require_subcommand(1);
    auto *stats_delay = stats->add_subcommand("delay", "RMS and maximum delay spread table");
    auto *stats_ang = stats->add_subcommand("angular", "Spatial lobe and RMS angular spread table");
    for (auto *cmd : {stats_delay, stats_ang}) {
        add_manifest(cmd);
        cmd->add_option("--threshold-db", thresholds, "Threshold below peak, dB (repeatable)");
        cmd->add_option("--out", out, "Write CSV here instead of stdout");
    }

    auto *pas = app.add_subcommand("pas", "Power angular spectrum");
    pas->require_subcommand(1);
    auto *pas_dump = pas->add_subcommand("dump", "Per-bin PAS CSV (bin_deg, power_db) for one location");
    add_manifest(pas_dump);
    pas_dump->add_option("--tx", tx_id, "TX identifier")->required();
    pas_dump->add_option("--rx", rx_id, "RX identifier")->required();
    pas_dump->add_option("--pol", pol_str, "VV or VH")->check(CLI::IsMember({"VV", "VH"}));
    pas_dump->add_option("--side", side_str, "AOA or AOD")->check(CLI::IsMember({"AOA", "AOD"}));
    pas_dump->add_option("--threshold-db", pas_threshold, "Threshold below peak, dB");
    pas_dump->add_option("--out", out, "Write CSV here instead of stdout");

    auto *xpd = app.add_subcommand("xpd", "Directional cross-polarisation discrimination");
    xpd->require_subcommand(1);
    auto *xpd_report = xpd->add_subcommand("report", "Per-class XPD summary and CDF");
    add_manifest(xpd_report);
    xpd_report->add_option("--out", out, "Directory for per-class CDF CSVs");

    auto *synth = app.add_subcommand("synth", "Render a synthetic campaign in the measurement format");
    synth->add_option("--params", params_path, "Synthesis parameter JSON (defaults when omitted)");
    synth->add_option("--n", n_locations, "Number of locations")->check(CLI::PositiveNumber);
    synth->add_option("--seed", seed, "Campaign seed");
    synth->add_option("--out", out, "Output directory")->required();

    auto *report = app.add_subcommand("report", "Full pipeline: fits, tables and XPD report bundle");
    add_manifest(report);
    report->add_option("--threshold-db", thresholds, "Threshold below peak, dB (repeatable)");
    report->add_option("--carrier-hz", carrier, "Override the manifest carrier");
    report->add_option("--out", out, "Output directory")->required();
    report->add_option("--seed", seed, "Recorded in the report config");
    report->add_option("--format", formats, "csv and/or json (repeatable)")->check(CLI::IsMember({"csv", "json"}));
    report->add_flag("--all-locations", all_locations, "Include NLOS locations in path-loss fits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*ingest) {
            const auto c = subthz::ingest_campaign(manifest);
            nlohmann::json j;
            j["campaign_id"] = c.campaign_id;
            j["carrier_hz"] = c.carrier_hz;
            j["locations"] = nlohmann::json::array();
            for (const auto &l : c.locations) {
                std::size_t live = 0;
                for (const auto &s : l.sweeps) live += s.detectable() ? 1 : 0;
                j["locations"].push_back({{"tx_id", l.tx_id},
                                          {"rx_id", l.rx_id},
                                          {"polarization", std::string(subthz::to_string(l.polarization))},
                                          {"los", l.los},
                                          {"distance_m", l.distance_m()},
                                          {"n_sweeps", l.sweeps.size()},
                                          {"n_detectable", live}});
            }
            emit(j.dump(2) + "\n", out);
        } else if (*fit_pl) {
            const auto c = subthz::ingest_campaign(manifest);
            const double f = carrier.value_or(c.carrier_hz);
            const auto split = subthz::split_by_polarization(c);
            const auto kind = subthz::parse_path_kind(kind_str);
            const auto pol = subthz::parse_polarization(pol_str);
            const auto vv = subthz::path_loss_samples(split.vv, kind, !all_locations);
            const auto samples = pol == subthz::Polarization::VV ? vv : subthz::path_loss_samples(split.vh, kind, !all_locations);
            auto j = subthz::ci_json(subthz::fit_ci(samples, f));
            if (pol == subthz::Polarization::VH) {
                const auto cix = subthz::fit_cix(samples, subthz::fit_ci(vv, f), f);
                j["xpd_db"] = cix.xpd_db;
                j["cix_sigma_db"] = cix.sigma_db;
            }
            std::cout << j.dump(2) << "\n";
            if (!out.empty()) {
                const std::string stem = pol_str + "_" + kind_str;
                std::filesystem::create_directories(out);
                subthz::detail::write_file(std::filesystem::path(out) / ("fit_" + stem + ".json"), j.dump(2) + "\n");
                subthz::detail::write_file(std::filesystem::path(out) / ("scatter_" + stem + ".csv"),
                                           subthz::format_scatter_csv(samples));
            }
        } else if (*stats_delay || *stats_ang) {
            const auto c = subthz::ingest_campaign(manifest);
            std::vector<subthz::LocationMeasurement> vv;
            for (const auto &l : subthz::split_by_polarization(c).vv)
                if (l.has_signal()) vv.push_back(l);
            const auto ts = thresholds_or_default(thresholds);
            if (*stats_delay) {
                std::vector<subthz::DelaySummary> rows;
                for (double t : ts) rows.push_back(subthz::campaign_delay_summary(vv, t));
                emit(subthz::format_delay_table(rows), out);
            } else {
                std::vector<subthz::AngularSummary> rows;
                for (double t : ts) rows.push_back(subthz::campaign_angular_summary(vv, t));
                emit(subthz::format_angular_table(rows), out);
            }
        } else if (*pas_dump) {
            const auto c = subthz::ingest_campaign(manifest);
            const auto &loc = find_location(c, tx_id, rx_id, subthz::parse_polarization(pol_str));
            const auto side = side_str == "AOD" ? subthz::Side::AOD : subthz::Side::AOA;
            emit(subthz::format_pas_csv(subthz::power_angular_spectrum(loc, side, pas_threshold)), out);
        } else if (*xpd_report) {
            const auto c = subthz::ingest_campaign(manifest);
            const auto xpds = subthz::campaign_directional_xpd(subthz::split_by_polarization(c));
            const auto summary = subthz::xpd_summary(xpds);
            std::cout << subthz::xpd_summary_json(summary).dump(2) << "\n";
            if (!out.empty()) {
                std::filesystem::create_directories(out);
                for (const auto &s : summary)
                    subthz::detail::write_file(std::filesystem::path(out) / ("xpd_" + std::string(subthz::to_string(s.path_class)) + ".csv"),
                                               subthz::format_xpd_cdf_csv(s));
            }
        } else if (*synth) {
            subthz::SynthesisParams params;
            if (!params_path.empty()) {
                try {
                    params = nlohmann::json::parse(subthz::detail::read_file(params_path)).get<subthz::SynthesisParams>();
                } catch (const nlohmann::json::parse_error &e) {
                    throw subthz::parse_error(params_path, 1, e.what());
                }
            }
            const auto path = subthz::render_campaign(params, n_locations, seed, out);
            spdlog::info("wrote {}", path.string());
            std::cout << path.string() << "\n";
        } else if (*report) {
            subthz::RunConfig cfg;
            cfg.manifest = manifest;
            cfg.thresholds_db = thresholds_or_default(thresholds);
            cfg.carrier_hz = carrier;
            cfg.out_dir = out;
            cfg.seed = seed;
            cfg.los_only_fits = !all_locations;
            if (!formats.empty()) {
                cfg.emit_csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
                cfg.emit_json = std::find(formats.begin(), formats.end(), "json") != formats.end();
            }
            const auto bundle = subthz::run_pipeline(cfg);
            for (const auto &[name, _] : bundle) spdlog::info("wrote {}", (std::filesystem::path(out) / name).string());
        }
    } catch (const subthz::degenerate_fit_error &e) {
        spdlog::error("degenerate fit: {}", e.what());
        return kExitDegenerateFit;
    } catch (const subthz::io_error &e) {
        spdlog::error("I/O: {}", e.what());
        return kExitIo;
    } catch (const std::filesystem::filesystem_error &e) {
        spdlog::error("I/O: {}", e.what());
        return kExitIo;
    } catch (const subthz::error &e) {
        spdlog::error("validation: {}", e.what());
        return kExitValidation;
    } catch (const nlohmann::json::exception &e) {
        spdlog::error("validation: {}", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
