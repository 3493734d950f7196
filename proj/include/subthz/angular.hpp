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


#ifndef SUBTHZ_ANGULAR_HPP_
#define SUBTHZ_ANGULAR_HPP_

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "subthz/common.hpp"
#include "subthz/measurement.hpp"

namespace subthz {

enum class Side { AOD, AOA };

inline std::string_view to_string(Side s) { return s == Side::AOD ? "AOD" : "AOA"; }

struct PowerAngularSpectrum {
    Side side = Side::AOA;
    double step_deg = 8.0;
    std::vector<double> bins_deg;   // bin centers, uniform step
    std::vector<double> powers_mw;  // linear, >= 0

    std::size_t size() const { return powers_mw.size(); }

    // Uniform grid of `n` bins starting at `offset_deg`.
    static PowerAngularSpectrum make(Side side, std::size_t n, double offset_deg = 0.0) {
        PowerAngularSpectrum pas;
        pas.side = side;
        pas.step_deg = 360.0 / static_cast<double>(n);
        pas.bins_deg.resize(n);
        pas.powers_mw.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) pas.bins_deg[k] = wrap_360(offset_deg + pas.step_deg * static_cast<double>(k));
        return pas;
    }
};

struct SpatialLobe {
    double start_deg = 0.0;  // first bin center, walking counter-clockwise
    double end_deg = 0.0;    // last bin center
    double peak_deg = 0.0;
    double peak_power_mw = 0.0;
    double lobe_power_mw = 0.0;
    std::size_t n_bins = 0;
};

struct AngularSpread {
    double rms_deg = 0.0;
    double mean_deg = 0.0;
    bool degenerate_mean = false;  // resultant ~ 0; mean forced to 0 deg
};

struct AngularStats {
    double rmsas_deg = 0.0;
    std::size_t n_lobes = 0;
    double threshold_db = 0.0;
};

namespace detail {

// Grid offset of one side's pointing azimuths, in [0, step).
inline double grid_offset(double az_deg, double step_deg) {
    double off = std::fmod(wrap_360(az_deg), step_deg);
    if (step_deg - off < 1e-9) off = 0.0;
    return off;
}

}  // namespace detail

// Integrated power per azimuth bin on one side. Taps are kept when they lie
// within threshold_db of the strongest tap over all pointings (and above the
// noise floor); surviving taps are summed over the other side's pointings.
inline PowerAngularSpectrum power_angular_spectrum(const LocationMeasurement &loc, Side side, double threshold_db) {
    if (!(threshold_db > 0.0)) throw validation_error("threshold_db", "must be > 0");
    const auto &ant = side == Side::AOD ? loc.tx_antenna : loc.rx_antenna;
    const std::size_t n = ant.sweep_size();
    const double step = ant.az_step_deg;
    const double gains_db = loc.tx_antenna.gain_dbi + loc.rx_antenna.gain_dbi;
    auto az_of = [side](const DirectionalPdp &s) { return side == Side::AOD ? s.tx_az_deg : s.rx_az_deg; };

    const DirectionalPdp *first = nullptr;
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto &s : loc.sweeps) {
        if (!s.detectable()) continue;
        if (!first) first = &s;
        peak = std::max(peak, s.peak_db());
    }
    if (!first) throw no_signal_error("no signal: no detectable sweep at " + loc.tx_id + "-" + loc.rx_id);

    const double offset = detail::grid_offset(az_of(*first), step);
    auto pas = PowerAngularSpectrum::make(side, n, offset);
    const double cut = peak - threshold_db;
    for (const auto &s : loc.sweeps) {
        if (!s.detectable()) continue;
        const auto k = std::llround((wrap_360(az_of(s)) - offset) / step);
        const auto bin = static_cast<std::size_t>(((k % static_cast<long long>(n)) + static_cast<long long>(n)) %
                                                  static_cast<long long>(n));
        for (double p : s.powers_db)
            if (p >= cut && p >= s.noise_floor_db) pas.powers_mw[bin] += db_to_linear(p - gains_db);
    }
    return pas;
}

// Circular-mean-centred RMS spread: mu = arg(sum P e^{j theta}), deviations
// wrapped to (-180, 180], then the power-weighted RMS of the deviations.
inline AngularSpread rms_angular_spread(const PowerAngularSpectrum &pas) {
    double total = 0.0, re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < pas.size(); ++i) {
        const double p = pas.powers_mw[i];
        if (p < 0.0) throw validation_error("powers_mw", "negative bin power");
        total += p;
        re += p * std::cos(deg_to_rad(pas.bins_deg[i]));
        im += p * std::sin(deg_to_rad(pas.bins_deg[i]));
    }
    if (!(total > 0.0)) throw no_signal_error("no signal: power angular spectrum is empty");

    AngularSpread out;
    if (std::hypot(re, im) < 1e-9 * total) {
        out.mean_deg = 0.0;
        out.degenerate_mean = true;
    } else {
        out.mean_deg = wrap_360(rad_to_deg(std::atan2(im, re)));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pas.size(); ++i) {
        const double dev = wrap_180(pas.bins_deg[i] - out.mean_deg);
        acc += pas.powers_mw[i] * dev * dev;
    }
    out.rms_deg = std::sqrt(acc / total);
    return out;
}

// Maximal circularly-contiguous runs of bins within threshold_db of the PAS peak.
inline std::vector<SpatialLobe> extract_spatial_lobes(const PowerAngularSpectrum &pas, double threshold_db) {
    const std::size_t n = pas.size();
    if (n == 0) throw validation_error("powers_mw", "empty power angular spectrum");
    if (!(threshold_db > 0.0)) throw validation_error("threshold_db", "must be > 0");
    double peak = 0.0;
    for (double p : pas.powers_mw) peak = std::max(peak, p);
    if (!(peak > 0.0)) throw no_signal_error("no signal: power angular spectrum is empty");
    const double cut = peak * db_to_linear(-threshold_db);

    std::vector<bool> marked(n);
    std::size_t gap = n;
    for (std::size_t i = 0; i < n; ++i) {
        marked[i] = pas.powers_mw[i] > 0.0 && pas.powers_mw[i] >= cut;
        if (!marked[i] && gap == n) gap = i;
    }

    std::vector<SpatialLobe> lobes;
    auto extend = [&](SpatialLobe &lobe, std::size_t i) {
        if (lobe.n_bins == 0) lobe.start_deg = pas.bins_deg[i];
        lobe.end_deg = pas.bins_deg[i];
        lobe.lobe_power_mw += pas.powers_mw[i];
        if (pas.powers_mw[i] > lobe.peak_power_mw) {
            lobe.peak_power_mw = pas.powers_mw[i];
            lobe.peak_deg = pas.bins_deg[i];
        }
        ++lobe.n_bins;
    };

    if (gap == n) {  // every bin marked: one lobe spanning the ring
        SpatialLobe all;
        for (std::size_t i = 0; i < n; ++i) extend(all, i);
        lobes.push_back(all);
        return lobes;
    }
    // Walk the ring starting just after an unmarked bin so no run is split.
    SpatialLobe current;
    for (std::size_t step = 1; step <= n; ++step) {
        const std::size_t i = (gap + step) % n;
        if (marked[i]) {
            extend(current, i);
        } else if (current.n_bins > 0) {
            lobes.push_back(current);
            current = {};
        }
    }
    if (current.n_bins > 0) lobes.push_back(current);
    return lobes;
}

inline AngularStats angular_stats(const LocationMeasurement &loc, Side side, double threshold_db) {
    const auto pas = power_angular_spectrum(loc, side, threshold_db);
    return {rms_angular_spread(pas).rms_deg, extract_spatial_lobes(pas, threshold_db).size(), threshold_db};
}

// Campaign angular summary at one threshold: one value per location and side.
struct AngularSummary {
    double threshold_db = 0.0;
    Summary aoa_lobes;
    Summary aod_lobes;
    Summary aoa_rmsas;
    Summary aod_rmsas;
};

struct AngularSamples {
    std::vector<double> aoa_lobes, aod_lobes, aoa_rmsas, aod_rmsas;
};

inline AngularSamples collect_angular_samples(std::span<const LocationMeasurement> locs, double threshold_db) {
    AngularSamples out;
    for (const auto &loc : locs) {
        const auto aoa = angular_stats(loc, Side::AOA, threshold_db);
        const auto aod = angular_stats(loc, Side::AOD, threshold_db);
        out.aoa_lobes.push_back(static_cast<double>(aoa.n_lobes));
        out.aod_lobes.push_back(static_cast<double>(aod.n_lobes));
        out.aoa_rmsas.push_back(aoa.rmsas_deg);
        out.aod_rmsas.push_back(aod.rmsas_deg);
    }
    return out;
}

inline AngularSummary campaign_angular_summary(std::span<const LocationMeasurement> locs, double threshold_db) {
    if (locs.empty()) throw validation_error("locations", "campaign summary needs at least one location");
    auto s = collect_angular_samples(locs, threshold_db);
    return {threshold_db, summarize(std::move(s.aoa_lobes)), summarize(std::move(s.aod_lobes)),
            summarize(std::move(s.aoa_rmsas)), summarize(std::move(s.aod_rmsas))};
}

}  // namespace subthz

#endif  // SUBTHZ_ANGULAR_HPP_
