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


#ifndef SUBTHZ_DELAY_HPP_
#define SUBTHZ_DELAY_HPP_

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "subthz/common.hpp"
#include "subthz/measurement.hpp"

namespace subthz {

// One multipath component in linear units.
struct Tap {
    double delay_ns = 0.0;
    double power_mw = 0.0;
};

// Omnidirectional PDP reconstructed from directional sweeps, antenna gains removed.
struct OmniPdp {
    std::vector<double> delays_ns;
    std::vector<double> powers_mw;
    std::string tx_id;
    std::string rx_id;
    Polarization polarization = Polarization::VV;

    double total_power_mw() const {
        double acc = 0.0;
        for (double p : powers_mw) acc += p;
        return acc;
    }
};

struct DelayStats {
    double rmsds_ns = 0.0;
    double mds_ns = 0.0;
    double threshold_db = 0.0;
    std::size_t n_taps = 0;
};

// Bin-wise linear sum over every detectable pointing pair. Bins below a
// sweep's noise floor do not contribute. Beams are treated as tiling the
// azimuth plane (step == HPBW), so overlap is not corrected.
inline OmniPdp synthesize_omni_pdp(const LocationMeasurement &loc, double delay_resolution_ns = 2.0) {
    const double gains_db = loc.tx_antenna.gain_dbi + loc.rx_antenna.gain_dbi;
    std::map<long long, double> bins;
    for (const auto &s : loc.sweeps) {
        if (!s.detectable()) continue;
        for (std::size_t i = 0; i < s.powers_db.size(); ++i) {
            if (s.powers_db[i] < s.noise_floor_db) continue;
            const auto bin = std::llround(s.delays_ns[i] / delay_resolution_ns);
            bins[bin] += db_to_linear(s.powers_db[i] - gains_db);
        }
    }
    if (bins.empty())
        throw no_signal_error("no signal: no detectable sweep at " + loc.tx_id + "-" + loc.rx_id + " (" +
                              std::string(to_string(loc.polarization)) + ")");
    OmniPdp omni;
    omni.tx_id = loc.tx_id;
    omni.rx_id = loc.rx_id;
    omni.polarization = loc.polarization;
    omni.delays_ns.reserve(bins.size());
    omni.powers_mw.reserve(bins.size());
    for (const auto &[bin, p] : bins) {
        omni.delays_ns.push_back(static_cast<double>(bin) * delay_resolution_ns);
        omni.powers_mw.push_back(p);
    }
    return omni;
}

// Taps within threshold_db of the strongest tap.
inline std::vector<Tap> thresholded_taps(const OmniPdp &pdp, double threshold_db) {
    if (!(threshold_db > 0.0)) throw validation_error("threshold_db", "must be > 0");
    double peak = 0.0;
    for (double p : pdp.powers_mw) peak = std::max(peak, p);
    if (!(peak > 0.0)) throw no_signal_error("no signal: omni PDP is empty");
    const double cut = peak * db_to_linear(-threshold_db);
    std::vector<Tap> taps;
    for (std::size_t i = 0; i < pdp.powers_mw.size(); ++i)
        if (pdp.powers_mw[i] >= cut) taps.push_back({pdp.delays_ns[i], pdp.powers_mw[i]});
    return taps;
}

inline std::vector<Tap> thresholded_taps(const DirectionalPdp &pdp, double threshold_db) {
    const auto kept = threshold_pdp(pdp, threshold_db);
    std::vector<Tap> taps;
    taps.reserve(kept.delays_ns.size());
    for (std::size_t i = 0; i < kept.delays_ns.size(); ++i) taps.push_back({kept.delays_ns[i], db_to_linear(kept.powers_db[i])});
    return taps;
}

// Power-weighted standard deviation of tap delays. Evaluated about the mean
// delay, which is algebraically the same as sqrt(E[t^2] - E[t]^2).
inline double rms_delay_spread(std::span<const Tap> taps) {
    if (taps.empty()) throw no_signal_error("no signal: no taps above threshold");
    double p_sum = 0.0, pt_sum = 0.0;
    for (const auto &t : taps) {
        p_sum += t.power_mw;
        pt_sum += t.power_mw * t.delay_ns;
    }
    const double mean = pt_sum / p_sum;
    double var = 0.0;
    for (const auto &t : taps) var += t.power_mw * (t.delay_ns - mean) * (t.delay_ns - mean);
    return std::sqrt(var / p_sum);
}

// Excess delay between first and last surviving tap.
inline double max_delay_spread(std::span<const Tap> taps) {
    if (taps.empty()) throw no_signal_error("no signal: no taps above threshold");
    auto [lo, hi] = std::minmax_element(taps.begin(), taps.end(),
                                        [](const Tap &a, const Tap &b) { return a.delay_ns < b.delay_ns; });
    return hi->delay_ns - lo->delay_ns;
}

template <typename Pdp>
double rms_delay_spread(const Pdp &pdp, double threshold_db) {
    const auto taps = thresholded_taps(pdp, threshold_db);
    return rms_delay_spread(std::span<const Tap>(taps));
}

template <typename Pdp>
double max_delay_spread(const Pdp &pdp, double threshold_db) {
    const auto taps = thresholded_taps(pdp, threshold_db);
    return max_delay_spread(std::span<const Tap>(taps));
}

template <typename Pdp>
DelayStats delay_stats(const Pdp &pdp, double threshold_db) {
    const auto taps = thresholded_taps(pdp, threshold_db);
    return {rms_delay_spread(std::span<const Tap>(taps)), max_delay_spread(std::span<const Tap>(taps)), threshold_db,
            taps.size()};
}

// Campaign delay-spread summary at one threshold.
struct DelaySummary {
    double threshold_db = 0.0;
    Summary omni_rmsds;
    Summary omni_mds;
    Summary dir_rmsds;
    Summary dir_mds;
};

// Raw per-location (omni) and per-direction values feeding a DelaySummary.
struct DelaySamples {
    std::vector<double> omni_rmsds, omni_mds, dir_rmsds, dir_mds;
};

inline DelaySamples collect_delay_samples(std::span<const LocationMeasurement> locs, double threshold_db,
                                          double delay_resolution_ns = 2.0) {
    DelaySamples out;
    for (const auto &loc : locs) {
        const auto omni = delay_stats(synthesize_omni_pdp(loc, delay_resolution_ns), threshold_db);
        out.omni_rmsds.push_back(omni.rmsds_ns);
        out.omni_mds.push_back(omni.mds_ns);
        for (const auto &s : loc.sweeps) {
            if (!s.detectable()) continue;
            const auto d = delay_stats(s, threshold_db);
            out.dir_rmsds.push_back(d.rmsds_ns);
            out.dir_mds.push_back(d.mds_ns);
        }
    }
    return out;
}

inline DelaySummary campaign_delay_summary(std::span<const LocationMeasurement> locs, double threshold_db,
                                           double delay_resolution_ns = 2.0) {
    if (locs.empty()) throw validation_error("locations", "campaign summary needs at least one location");
    auto s = collect_delay_samples(locs, threshold_db, delay_resolution_ns);
    return {threshold_db, summarize(std::move(s.omni_rmsds)), summarize(std::move(s.omni_mds)),
            summarize(std::move(s.dir_rmsds)), summarize(std::move(s.dir_mds))};
}

}  // namespace subthz

#endif  // SUBTHZ_DELAY_HPP_
