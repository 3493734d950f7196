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


#ifndef SUBTHZ_PATHLOSS_HPP_
#define SUBTHZ_PATHLOSS_HPP_

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subthz/common.hpp"
#include "subthz/delay.hpp"
#include "subthz/measurement.hpp"

namespace subthz {

// Free-space path loss 20 log10(4 pi d f / c), dB.
inline double fspl_db(double f_hz, double d_m) {
    if (!(f_hz > 0.0)) throw validation_error("carrier_hz", "must be > 0");
    if (!(d_m > 0.0)) throw validation_error("distance_m", "must be > 0");
    return 20.0 * std::log10(4.0 * std::numbers::pi * d_m * f_hz / kSpeedOfLight);
}

enum class PathKind { Omni, DirB, DirNBB, DirNB };

inline std::string_view to_string(PathKind k) {
    switch (k) {
        case PathKind::Omni: return "omni";
        case PathKind::DirB: return "B";
        case PathKind::DirNBB: return "NBB";
        case PathKind::DirNB: return "NB";
    }
    return "?";
}

inline PathKind parse_path_kind(std::string_view s) {
    if (s == "omni") return PathKind::Omni;
    if (s == "B") return PathKind::DirB;
    if (s == "NBB") return PathKind::DirNBB;
    if (s == "NB") return PathKind::DirNB;
    throw validation_error("kind", "expected omni|B|NBB|NB, got \"" + std::string(s) + "\"");
}

struct PathLossSample {
    double distance_m = 0.0;
    double pl_db = 0.0;
    Polarization polarization = Polarization::VV;
    PathKind kind = PathKind::Omni;
    bool los = true;
    std::optional<Direction> direction;  // set for directional samples
    std::string tx_id;
    std::string rx_id;
};

struct CiFit {
    double ple = 0.0;
    double sigma_db = 0.0;
    std::size_t n_samples = 0;
    double fspl_anchor_db = 0.0;
};

struct CixFit {
    double xpd_db = 0.0;
    double sigma_db = 0.0;
    double ple_vv = 0.0;
    std::size_t n_samples = 0;
};

// Received power of one pointing pair: linear sum of every bin at or above
// the noise floor, dBm, antenna gains included.
inline double directional_received_power_dbm(const DirectionalPdp &pdp) {
    if (!pdp.detectable()) throw no_signal_error("no detectable power in direction");
    double acc = 0.0;
    for (double p : pdp.powers_db)
        if (p >= pdp.noise_floor_db) acc += db_to_linear(p);
    return linear_to_db(acc);
}

// PL = Ptx - (total omni received power with antenna gains removed).
inline PathLossSample omni_path_loss(const LocationMeasurement &loc, double delay_resolution_ns = 2.0) {
    OmniPdp omni;
    try {
        omni = synthesize_omni_pdp(loc, delay_resolution_ns);
    } catch (const no_signal_error &) {
        throw no_signal_error("no detectable power at " + loc.tx_id + "-" + loc.rx_id + " (" +
                              std::string(to_string(loc.polarization)) + ")");
    }
    PathLossSample s;
    s.distance_m = loc.distance_m();
    s.pl_db = loc.tx_power_dbm - linear_to_db(omni.total_power_mw());
    s.polarization = loc.polarization;
    s.kind = PathKind::Omni;
    s.los = loc.los;
    s.tx_id = loc.tx_id;
    s.rx_id = loc.rx_id;
    return s;
}

// B: the detectable pair pointing along the geometric LOS bearing on both
// ends (within half a step, closest wins). NBB: strongest of the rest. NB:
// everything else. NLOS locations have no B.
inline std::map<Direction, PathKind> classify_directions(const LocationMeasurement &loc) {
    std::map<Direction, PathKind> out;
    std::vector<const DirectionalPdp *> live;
    for (const auto &s : loc.sweeps)
        if (s.detectable()) live.push_back(&s);
    if (live.empty()) return out;

    std::optional<Direction> boresight;
    if (loc.los) {
        const double btx = loc.los_bearing_tx_deg();
        const double brx = loc.los_bearing_rx_deg();
        const double tol_tx = loc.tx_antenna.az_step_deg / 2.0 + 1e-9;
        const double tol_rx = loc.rx_antenna.az_step_deg / 2.0 + 1e-9;
        double best = std::numeric_limits<double>::infinity();
        for (const auto *s : live) {
            const double etx = std::abs(wrap_180(s->tx_az_deg - btx));
            const double erx = std::abs(wrap_180(s->rx_az_deg - brx));
            if (etx > tol_tx || erx > tol_rx) continue;
            if (etx + erx < best || (etx + erx == best && s->direction() < *boresight)) {
                best = etx + erx;
                boresight = s->direction();
            }
        }
    }

    const DirectionalPdp *strongest = nullptr;
    double strongest_dbm = -std::numeric_limits<double>::infinity();
    for (const auto *s : live) {
        if (boresight && s->direction() == *boresight) continue;
        const double p = directional_received_power_dbm(*s);
        if (p > strongest_dbm || (p == strongest_dbm && s->direction() < strongest->direction())) {
            strongest_dbm = p;
            strongest = s;
        }
    }
    for (const auto *s : live) {
        PathKind k = PathKind::DirNB;
        if (boresight && s->direction() == *boresight) k = PathKind::DirB;
        else if (s == strongest) k = PathKind::DirNBB;
        out.emplace(s->direction(), k);
    }
    return out;
}

// One sample per detectable direction: PL = Ptx + Gtx + Grx - Pdir.
inline std::vector<PathLossSample> directional_path_loss(const LocationMeasurement &loc) {
    const auto classes = classify_directions(loc);
    const double budget = loc.tx_power_dbm + loc.tx_antenna.gain_dbi + loc.rx_antenna.gain_dbi;
    std::vector<PathLossSample> out;
    for (const auto &s : loc.sweeps) {
        if (!s.detectable()) continue;
        PathLossSample p;
        p.distance_m = loc.distance_m();
        p.pl_db = budget - directional_received_power_dbm(s);
        p.polarization = loc.polarization;
        p.kind = classes.at(s.direction());
        p.los = loc.los;
        p.direction = s.direction();
        p.tx_id = loc.tx_id;
        p.rx_id = loc.rx_id;
        out.push_back(std::move(p));
    }
    return out;
}

// CI model, MMSE slope through the FSPL(f, 1 m) anchor:
//   n = sum(a b) / sum(a^2),  a = 10 log10(d / d0),  b = PL - FSPL(f, d0)
//   sigma = sqrt(mean((b - n a)^2))   (population form)
inline CiFit fit_ci(std::span<const double> distances_m, std::span<const double> pl_db, double f_hz) {
    if (distances_m.size() != pl_db.size()) throw validation_error("samples", "distance/path-loss length mismatch");
    if (distances_m.size() < 2) throw degenerate_fit_error("CI fit needs at least 2 samples");
    const double anchor = fspl_db(f_hz, kReferenceDistanceM);
    double saa = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < distances_m.size(); ++i) {
        if (!(distances_m[i] >= kReferenceDistanceM)) throw validation_error("distance_m", "must be >= d0 = 1 m");
        const double a = 10.0 * std::log10(distances_m[i] / kReferenceDistanceM);
        const double b = pl_db[i] - anchor;
        saa += a * a;
        sab += a * b;
    }
    if (saa < 1e-12) throw degenerate_fit_error("CI fit is degenerate: all distances equal d0");
    CiFit fit;
    fit.ple = sab / saa;
    fit.fspl_anchor_db = anchor;
    fit.n_samples = distances_m.size();
    double sse = 0.0;
    for (std::size_t i = 0; i < distances_m.size(); ++i) {
        const double a = 10.0 * std::log10(distances_m[i] / kReferenceDistanceM);
        const double r = pl_db[i] - anchor - fit.ple * a;
        sse += r * r;
    }
    fit.sigma_db = std::sqrt(sse / static_cast<double>(distances_m.size()));
    return fit;
}

namespace detail {

inline void check_grouping(std::span<const PathLossSample> samples) {
    for (const auto &s : samples)
        if (s.polarization != samples.front().polarization || s.kind != samples.front().kind)
            throw validation_error("samples", "mixed polarization/kind grouping in one fit");
}

}  // namespace detail

inline CiFit fit_ci(std::span<const PathLossSample> samples, double f_hz) {
    if (samples.size() < 2) throw degenerate_fit_error("CI fit needs at least 2 samples");
    detail::check_grouping(samples);
    std::vector<double> d, pl;
    for (const auto &s : samples) {
        d.push_back(s.distance_m);
        pl.push_back(s.pl_db);
    }
    return fit_ci(d, pl, f_hz);
}

// CIX: the V-V slope is held fixed and the MMSE additive constant is the XPD,
//   xpd = mean(PL_VH - FSPL(f, d0) - 10 n_VV log10(d / d0)).
inline CixFit fit_cix(std::span<const double> distances_m, std::span<const double> pl_vh_db, const CiFit &ci_vv,
                      double f_hz) {
    if (distances_m.size() != pl_vh_db.size()) throw validation_error("samples", "distance/path-loss length mismatch");
    if (distances_m.empty()) throw degenerate_fit_error("CIX fit needs at least one V-H sample");
    const double anchor = fspl_db(f_hz, kReferenceDistanceM);
    std::vector<double> excess(distances_m.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < distances_m.size(); ++i) {
        if (!(distances_m[i] >= kReferenceDistanceM)) throw validation_error("distance_m", "must be >= d0 = 1 m");
        excess[i] = pl_vh_db[i] - anchor - 10.0 * ci_vv.ple * std::log10(distances_m[i] / kReferenceDistanceM);
        acc += excess[i];
    }
    CixFit fit;
    fit.ple_vv = ci_vv.ple;
    fit.n_samples = distances_m.size();
    fit.xpd_db = acc / static_cast<double>(excess.size());
    double sse = 0.0;
    for (double e : excess) sse += (e - fit.xpd_db) * (e - fit.xpd_db);
    fit.sigma_db = std::sqrt(sse / static_cast<double>(excess.size()));
    return fit;
}

inline CixFit fit_cix(std::span<const PathLossSample> vh_samples, const CiFit &ci_vv, double f_hz) {
    if (vh_samples.empty()) throw degenerate_fit_error("CIX fit needs at least one V-H sample");
    detail::check_grouping(vh_samples);
    std::vector<double> d, pl;
    for (const auto &s : vh_samples) {
        d.push_back(s.distance_m);
        pl.push_back(s.pl_db);
    }
    return fit_cix(d, pl, ci_vv, f_hz);
}

}  // namespace subthz

#endif  // SUBTHZ_PATHLOSS_HPP_
