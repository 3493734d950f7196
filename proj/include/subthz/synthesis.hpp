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


#ifndef SUBTHZ_SYNTHESIS_HPP_
#define SUBTHZ_SYNTHESIS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "subthz/common.hpp"
#include "subthz/io.hpp"
#include "subthz/measurement.hpp"
#include "subthz/pathloss.hpp"
#include "subthz/xpd.hpp"

namespace subthz {

struct NormalLaw {
    double mean_db = 0.0;
    double std_db = 0.0;
    friend bool operator==(const NormalLaw &, const NormalLaw &) = default;
};

// Shifted Poisson: min + Poisson(mean - min), clipped at max.
struct LobeCountLaw {
    double mean = 3.5;
    int min = 1;
    int max = 7;
    friend bool operator==(const LobeCountLaw &, const LobeCountLaw &) = default;
};

// Natural-log domain parameters of a log-normal law over nanoseconds.
struct LogNormalLaw {
    double log_mean = 0.0;
    double log_std = 0.0;

    // Law whose median and mean hit the given values (mean >= median).
    static LogNormalLaw from_median_mean(double median, double mean) {
        return {std::log(median), std::sqrt(2.0 * std::log(mean / median))};
    }
    double median() const { return std::exp(log_mean); }
    double mean() const { return std::exp(log_mean + 0.5 * log_std * log_std); }
    friend bool operator==(const LogNormalLaw &, const LogNormalLaw &) = default;
};

struct SynthesisParams {
    double ple = 1.86;
    double shadow_sigma_db = 1.5;
    NormalLaw xpd_boresight{26.2, 2.7};
    NormalLaw xpd_reflection{20.2, 4.3};
    LobeCountLaw lobe_count_law{};
    LogNormalLaw rmsds_target_ns = LogNormalLaw::from_median_mean(10.4, 16.0);
    double carrier_hz = 142e9;
    double az_step_deg = 8.0;
    std::array<double, 2> distance_range_m{6.3, 39.6};
    // NLOS drops reuse the non-boresight directional PLE as a proxy.
    double nlos_ple = 4.58;
    double nlos_fraction = 2.0 / 13.0;
    // Non-first lobes sit uniformly in [-spread, 0] dB relative to the first.
    double lobe_power_spread_db = 25.0;
    // Intra-lobe PDP is truncated this far below its first tap.
    double pdp_dynamic_range_db = 30.0;
    double delay_resolution_ns = 2.0;
    double tx_power_dbm = 0.0;
    double antenna_gain_dbi = 27.0;
    double hpbw_deg = 8.0;
    double tx_height_m = 3.0;
    double rx_height_m = 1.5;
    double max_measurable_pl_db = 152.0;

    std::size_t grid_size() const { return static_cast<std::size_t>(std::lround(360.0 / az_step_deg)); }

    void validate() const {
        if (!(ple > 0.0)) throw validation_error("ple", "must be > 0");
        if (!(nlos_ple > 0.0)) throw validation_error("nlos_ple", "must be > 0");
        if (!(shadow_sigma_db >= 0.0)) throw validation_error("shadow_sigma_db", "must be >= 0");
        if (!(xpd_boresight.std_db >= 0.0)) throw validation_error("xpd_boresight.std_db", "must be >= 0");
        if (!(xpd_reflection.std_db >= 0.0)) throw validation_error("xpd_reflection.std_db", "must be >= 0");
        if (!(rmsds_target_ns.log_std >= 0.0)) throw validation_error("rmsds_target_ns.log_std", "must be >= 0");
        const auto &l = lobe_count_law;
        if (l.min < 1) throw validation_error("lobe_count_law.min", "must be >= 1");
        if (!(l.min <= l.mean && l.mean <= l.max)) throw validation_error("lobe_count_law", "need min <= mean <= max");
        if (!(carrier_hz > 0.0)) throw validation_error("carrier_hz", "must be > 0");
        AntennaConfig{antenna_gain_dbi, hpbw_deg, az_step_deg, rx_height_m}.validate("antenna");
        // Lobes keep at least one empty bin between them so they stay separable.
        if (static_cast<std::size_t>(2 * l.max) > grid_size())
            throw validation_error("lobe_count_law.max", "more lobes than separable grid positions");
        if (!(distance_range_m[0] > kReferenceDistanceM && distance_range_m[0] <= distance_range_m[1]))
            throw validation_error("distance_range_m", "need 1 m < lo <= hi");
        if (std::hypot(distance_range_m[0], 0.0) <= std::abs(tx_height_m - rx_height_m))
            throw validation_error("distance_range_m", "shorter than the antenna height difference");
        if (!(nlos_fraction >= 0.0 && nlos_fraction <= 1.0)) throw validation_error("nlos_fraction", "must be in [0,1]");
        if (!(lobe_power_spread_db >= 0.0)) throw validation_error("lobe_power_spread_db", "must be >= 0");
        if (!(pdp_dynamic_range_db > 0.0)) throw validation_error("pdp_dynamic_range_db", "must be > 0");
        if (!(delay_resolution_ns > 0.0)) throw validation_error("delay_resolution_ns", "must be > 0");
    }

    friend bool operator==(const SynthesisParams &, const SynthesisParams &) = default;
};

inline void to_json(nlohmann::json &j, const SynthesisParams &p) {
    j = nlohmann::json{
        {"ple", p.ple},
        {"shadow_sigma_db", p.shadow_sigma_db},
        {"xpd_boresight", {{"mean_db", p.xpd_boresight.mean_db}, {"std_db", p.xpd_boresight.std_db}}},
        {"xpd_reflection", {{"mean_db", p.xpd_reflection.mean_db}, {"std_db", p.xpd_reflection.std_db}}},
        {"lobe_count_law", {{"mean", p.lobe_count_law.mean}, {"min", p.lobe_count_law.min}, {"max", p.lobe_count_law.max}}},
        {"rmsds_target_ns", {{"log_mean", p.rmsds_target_ns.log_mean}, {"log_std", p.rmsds_target_ns.log_std}}},
        {"carrier_hz", p.carrier_hz},
        {"az_step_deg", p.az_step_deg},
        {"distance_range_m", p.distance_range_m},
        {"nlos_ple", p.nlos_ple},
        {"nlos_fraction", p.nlos_fraction},
        {"lobe_power_spread_db", p.lobe_power_spread_db},
        {"pdp_dynamic_range_db", p.pdp_dynamic_range_db},
        {"delay_resolution_ns", p.delay_resolution_ns},
        {"tx_power_dbm", p.tx_power_dbm},
        {"antenna_gain_dbi", p.antenna_gain_dbi},
        {"hpbw_deg", p.hpbw_deg},
        {"tx_height_m", p.tx_height_m},
        {"rx_height_m", p.rx_height_m},
        {"max_measurable_pl_db", p.max_measurable_pl_db},
    };
}

// Missing keys keep their defaults; unknown keys are rejected.
inline void from_json(const nlohmann::json &j, SynthesisParams &p) {
    if (!j.is_object()) throw validation_error("params", "expected a JSON object");
    const nlohmann::json defaults = SynthesisParams{};
    for (const auto &[key, value] : j.items()) {
        if (!defaults.contains(key)) throw validation_error(key, "unknown synthesis parameter");
        if (defaults[key].is_object())
            for (const auto &[sub, _] : value.items())
                if (!defaults[key].contains(sub)) throw validation_error(key + "." + sub, "unknown synthesis parameter");
    }
    nlohmann::json merged = defaults;
    merged.merge_patch(j);
    try {
        p.ple = merged["ple"].get<double>();
        p.shadow_sigma_db = merged["shadow_sigma_db"].get<double>();
        p.xpd_boresight = {merged["xpd_boresight"]["mean_db"].get<double>(), merged["xpd_boresight"]["std_db"].get<double>()};
        p.xpd_reflection = {merged["xpd_reflection"]["mean_db"].get<double>(), merged["xpd_reflection"]["std_db"].get<double>()};
        p.lobe_count_law = {merged["lobe_count_law"]["mean"].get<double>(), merged["lobe_count_law"]["min"].get<int>(),
                            merged["lobe_count_law"]["max"].get<int>()};
        p.rmsds_target_ns = {merged["rmsds_target_ns"]["log_mean"].get<double>(),
                             merged["rmsds_target_ns"]["log_std"].get<double>()};
        p.carrier_hz = merged["carrier_hz"].get<double>();
        p.az_step_deg = merged["az_step_deg"].get<double>();
        p.distance_range_m = merged["distance_range_m"].get<std::array<double, 2>>();
        p.nlos_ple = merged["nlos_ple"].get<double>();
        p.nlos_fraction = merged["nlos_fraction"].get<double>();
        p.lobe_power_spread_db = merged["lobe_power_spread_db"].get<double>();
        p.pdp_dynamic_range_db = merged["pdp_dynamic_range_db"].get<double>();
        p.delay_resolution_ns = merged["delay_resolution_ns"].get<double>();
        p.tx_power_dbm = merged["tx_power_dbm"].get<double>();
        p.antenna_gain_dbi = merged["antenna_gain_dbi"].get<double>();
        p.hpbw_deg = merged["hpbw_deg"].get<double>();
        p.tx_height_m = merged["tx_height_m"].get<double>();
        p.rx_height_m = merged["rx_height_m"].get<double>();
        p.max_measurable_pl_db = merged["max_measurable_pl_db"].get<double>();
    } catch (const nlohmann::json::exception &e) {
        throw validation_error("params", e.what());
    }
}

struct DropTap {
    double delay_ns = 0.0;
    double power_mw = 0.0;  // received power for 0 dBm transmitted, isotropic antennas
    double xpd_db = 0.0;
    PathClass path_class = PathClass::Reflection;
    friend bool operator==(const DropTap &, const DropTap &) = default;
};

// Angles are relative to the LOS bearing at each end.
struct DropLobe {
    double center_deg = 0.0;      // arrival (AOA)
    double aod_center_deg = 0.0;  // departure
    std::vector<DropTap> taps;
    friend bool operator==(const DropLobe &, const DropLobe &) = default;
};

struct ChannelDrop {
    double distance_m = 0.0;
    double pl_db = 0.0;
    bool los = true;
    double rmsds_target_ns = 0.0;
    std::vector<DropLobe> lobes;
    std::uint64_t seed = 0;

    double total_power_mw() const {
        double acc = 0.0;
        for (const auto &l : lobes)
            for (const auto &t : l.taps) acc += t.power_mw;
        return acc;
    }

    // Omnidirectional co/cross power ratio implied by the per-tap XPDs.
    double effective_xpd_db() const {
        double co = 0.0, cross = 0.0;
        for (const auto &l : lobes)
            for (const auto &t : l.taps) {
                co += t.power_mw;
                cross += t.power_mw * db_to_linear(-t.xpd_db);
            }
        return linear_to_db(co / cross);
    }

    friend bool operator==(const ChannelDrop &, const ChannelDrop &) = default;
};

// splitmix64 finaliser; derives independent per-drop seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {

// Unnormalised single-exponential PDP on the delay grid, truncated at
// dynamic_range_db below the first tap.
inline std::vector<double> exponential_shape(double decay_ns, double step_ns, double dynamic_range_db) {
    const double floor = db_to_linear(-dynamic_range_db);
    std::vector<double> shape;
    for (std::size_t k = 0;; ++k) {
        const double p = std::exp(-static_cast<double>(k) * step_ns / decay_ns);
        if (p < floor) break;
        shape.push_back(p);
    }
    return shape;
}

inline double shape_rmsds(const std::vector<double> &shape, double step_ns) {
    double ps = 0.0, pt = 0.0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        ps += shape[k];
        pt += shape[k] * static_cast<double>(k) * step_ns;
    }
    const double mean = pt / ps;
    double var = 0.0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        const double d = static_cast<double>(k) * step_ns - mean;
        var += shape[k] * d * d;
    }
    return std::sqrt(var / ps);
}

}  // namespace detail

// Decay constant whose truncated, gridded exponential PDP has the requested
// RMS delay spread (bisection in log-decay; the gridded spread grows with decay).
// The lower bracket is returned, so a target below the smallest two-tap spread
// yields a single-tap profile.
inline double solve_decay_ns(double target_rmsds_ns, double step_ns, double dynamic_range_db) {
    double lo = std::log(1e-3), hi = std::log(1e5);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = detail::shape_rmsds(detail::exponential_shape(std::exp(mid), step_ns, dynamic_range_db), step_ns);
        (r < target_rmsds_ns ? lo : hi) = mid;
        if (hi - lo < 1e-12) break;
    }
    return std::exp(lo);
}

// One stochastic realisation at `distance_m`. Deterministic in (params, distance, seed, los).
inline ChannelDrop sample_drop(const SynthesisParams &params, double distance_m, std::uint64_t seed, bool los = true) {
    params.validate();
    const double tol = 1e-9;
    if (!(distance_m >= params.distance_range_m[0] - tol && distance_m <= params.distance_range_m[1] + tol))
        throw validation_error("distance_m", "outside the parameter distance range");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ChannelDrop drop;
    drop.distance_m = distance_m;
    drop.los = los;
    drop.seed = seed;

    const double ple = los ? params.ple : params.nlos_ple;
    const double shadow = params.shadow_sigma_db * unit_normal(rng);
    drop.pl_db = fspl_db(params.carrier_hz, kReferenceDistanceM) + 10.0 * ple * std::log10(distance_m) + shadow;

    const auto &law = params.lobe_count_law;
    int n_lobes = law.min;
    if (law.mean > law.min) n_lobes += std::poisson_distribution<int>(law.mean - law.min)(rng);
    n_lobes = std::min(n_lobes, law.max);

    // Lobe placement on the pointing grid, per side, with an empty bin between lobes.
    const std::size_t n_bins = params.grid_size();
    auto place = [&](std::vector<bool> &used, std::size_t bin) {
        used[bin] = used[(bin + 1) % n_bins] = used[(bin + n_bins - 1) % n_bins] = true;
    };
    auto draw_bin = [&](std::vector<bool> &used) -> std::size_t {
        std::vector<std::size_t> free;
        for (std::size_t b = 0; b < n_bins; ++b)
            if (!used[b]) free.push_back(b);
        if (free.empty()) throw validation_error("lobe_count_law", "lobe placement unsatisfiable on the pointing grid");
        const auto pick = std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng);
        place(used, free[pick]);
        return free[pick];
    };
    std::vector<bool> used_aoa(n_bins, false), used_aod(n_bins, false);
    std::vector<std::pair<std::size_t, std::size_t>> bins;  // (aod, aoa)
    for (int k = 0; k < n_lobes; ++k) {
        if (k == 0 && los) {
            place(used_aod, 0);
            place(used_aoa, 0);
            bins.emplace_back(0, 0);
        } else {
            const auto aod = draw_bin(used_aod);
            const auto aoa = draw_bin(used_aoa);
            bins.emplace_back(aod, aoa);
        }
    }

    std::vector<double> lobe_weight(static_cast<std::size_t>(n_lobes), 1.0);
    for (std::size_t k = 1; k < lobe_weight.size(); ++k)
        lobe_weight[k] = db_to_linear(-params.lobe_power_spread_db * unit(rng));
    const double weight_sum = std::accumulate(lobe_weight.begin(), lobe_weight.end(), 0.0);

    drop.rmsds_target_ns =
        std::exp(params.rmsds_target_ns.log_mean + params.rmsds_target_ns.log_std * unit_normal(rng));
    const double decay = solve_decay_ns(drop.rmsds_target_ns, params.delay_resolution_ns, params.pdp_dynamic_range_db);
    const auto shape = detail::exponential_shape(decay, params.delay_resolution_ns, params.pdp_dynamic_range_db);
    const double shape_sum = std::accumulate(shape.begin(), shape.end(), 0.0);

    const double total_mw = db_to_linear(-drop.pl_db);
    const double tof_ns = distance_m / kSpeedOfLight * 1e9;
    const double first_delay = std::round(tof_ns / params.delay_resolution_ns);

    for (std::size_t k = 0; k < bins.size(); ++k) {
        DropLobe lobe;
        lobe.aod_center_deg = wrap_360(static_cast<double>(bins[k].first) * params.az_step_deg);
        lobe.center_deg = wrap_360(static_cast<double>(bins[k].second) * params.az_step_deg);
        const bool boresight = (k == 0 && los);
        const auto &xpd_law = boresight ? params.xpd_boresight : params.xpd_reflection;
        // Polarisation coupling is a property of the propagation mechanism, so
        // all taps of a lobe share one draw.
        const double xpd = xpd_law.mean_db + xpd_law.std_db * unit_normal(rng);
        const double lobe_mw = total_mw * lobe_weight[k] / weight_sum;
        for (std::size_t t = 0; t < shape.size(); ++t) {
            DropTap tap;
            tap.delay_ns = (first_delay + static_cast<double>(t)) * params.delay_resolution_ns;
            tap.power_mw = lobe_mw * shape[t] / shape_sum;
            tap.xpd_db = xpd;
            tap.path_class = boresight ? PathClass::Boresight : PathClass::Reflection;
            lobe.taps.push_back(tap);
        }
        drop.lobes.push_back(std::move(lobe));
    }
    return drop;
}

// Turns a drop into one location record (V-V or V-H). TX sits at the origin
// of its own row and the RX lies along +x, so the TX bearing is 0 deg and the
// RX bearing 180 deg; lobe angles are applied relative to those bearings.
inline LocationMeasurement drop_to_location(const ChannelDrop &drop, const SynthesisParams &params,
                                            Polarization pol, std::string tx_id, std::string rx_id, double row_y_m = 0.0) {
    LocationMeasurement loc;
    loc.tx_id = std::move(tx_id);
    loc.rx_id = std::move(rx_id);
    const double dz = params.tx_height_m - params.rx_height_m;
    const double horizontal = std::sqrt(std::max(0.0, drop.distance_m * drop.distance_m - dz * dz));
    loc.tx_pos_m = {0.0, row_y_m, params.tx_height_m};
    loc.rx_pos_m = {horizontal, row_y_m, params.rx_height_m};
    loc.polarization = pol;
    loc.los = drop.los;
    loc.tx_antenna = {params.antenna_gain_dbi, params.hpbw_deg, params.az_step_deg, params.tx_height_m};
    loc.rx_antenna = {params.antenna_gain_dbi, params.hpbw_deg, params.az_step_deg, params.rx_height_m};
    loc.tx_power_dbm = params.tx_power_dbm;
    const double budget = params.tx_power_dbm + 2.0 * params.antenna_gain_dbi;
    const double noise_floor = budget - params.max_measurable_pl_db;
    for (const auto &lobe : drop.lobes) {
        DirectionalPdp pdp;
        pdp.tx_az_deg = wrap_360(loc.los_bearing_tx_deg() + lobe.aod_center_deg);
        pdp.rx_az_deg = wrap_360(loc.los_bearing_rx_deg() + lobe.center_deg);
        pdp.noise_floor_db = noise_floor;
        for (const auto &t : lobe.taps) {
            pdp.delays_ns.push_back(t.delay_ns);
            pdp.powers_db.push_back(budget + linear_to_db(t.power_mw) - (pol == Polarization::VH ? t.xpd_db : 0.0));
        }
        loc.sweeps.push_back(std::move(pdp));
    }
    return loc;
}

// Campaign layout used when 13 locations are requested: spans the surveyed
// 6.3-39.6 m range.
inline constexpr std::array<double, 13> kThirteenLocationDistancesM{6.3,  8.4,  10.2, 12.9, 15.1, 17.6, 20.3,
                                                                   23.8, 26.5, 29.7, 33.0, 36.4, 39.6};

struct SyntheticCampaign {
    Campaign campaign;  // V-V and V-H record per drop, V-V first
    std::vector<ChannelDrop> drops;
};

// Builds n drops and both polarisation records for each. NLOS locations are
// round(n * nlos_fraction) indices picked by a seeded shuffle.
inline SyntheticCampaign synthesize_campaign(const SynthesisParams &params, std::size_t n_locations, std::uint64_t seed) {
    params.validate();
    if (n_locations < 1) throw validation_error("n_locations", "must be >= 1");

    std::vector<std::size_t> order(n_locations);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 layout_rng(mix_seed(seed, 0xFFFFFFFFULL));
    std::shuffle(order.begin(), order.end(), layout_rng);
    const auto n_nlos = static_cast<std::size_t>(std::lround(static_cast<double>(n_locations) * params.nlos_fraction));
    std::vector<bool> nlos(n_locations, false);
    for (std::size_t k = 0; k < n_nlos; ++k) nlos[order[k]] = true;

    const bool survey_layout = n_locations == kThirteenLocationDistancesM.size() &&
                              params.distance_range_m[0] <= kThirteenLocationDistancesM.front() &&
                              params.distance_range_m[1] >= kThirteenLocationDistancesM.back();

    SyntheticCampaign out;
    out.campaign.campaign_id = "synthetic-" + std::to_string(seed);
    out.campaign.carrier_hz = params.carrier_hz;
    out.campaign.tx_power_dbm = params.tx_power_dbm;
    for (std::size_t i = 0; i < n_locations; ++i) {
        std::mt19937_64 loc_rng(mix_seed(seed, i));
        double d = std::uniform_real_distribution<double>(params.distance_range_m[0], params.distance_range_m[1])(loc_rng);
        if (survey_layout) d = kThirteenLocationDistancesM[i];
        const std::uint64_t drop_seed = loc_rng();
        auto drop = sample_drop(params, d, drop_seed, !nlos[i]);

        const std::string tx = "TX" + std::to_string(1 + i % 5);
        char rx_buf[32];
        std::snprintf(rx_buf, sizeof rx_buf, "RX%03zu", i + 1);
        const double row = 50.0 * static_cast<double>(i);
        out.campaign.locations.push_back(drop_to_location(drop, params, Polarization::VV, tx, rx_buf, row));
        out.campaign.locations.push_back(drop_to_location(drop, params, Polarization::VH, tx, rx_buf, row));
        out.drops.push_back(std::move(drop));
    }
    return out;
}

// Writes the synthetic campaign in the measurement file format. Returns the manifest path.
inline std::filesystem::path render_campaign(const SynthesisParams &params, std::size_t n_locations, std::uint64_t seed,
                                             const std::filesystem::path &out_dir) {
    return write_campaign(synthesize_campaign(params, n_locations, seed).campaign, out_dir);
}

}  // namespace subthz

#endif  // SUBTHZ_SYNTHESIS_HPP_
