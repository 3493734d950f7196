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


// Independent reference implementations used only by the tests. Each one
// follows the textbook definition directly and shares no code path with the
// library routine it checks.

#ifndef SUBTHZ_TESTS_ORACLES_HPP_
#define SUBTHZ_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "subthz/measurement.hpp"

namespace oracle {

// Indices a bin survives under the threshold rule, by definition.
inline std::set<std::size_t> kept_bins(const subthz::DirectionalPdp &pdp, double threshold_db) {
    double peak = -1e300;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < pdp.powers_db.size(); ++i)
        if (pdp.powers_db[i] > peak) {
            peak = pdp.powers_db[i];
            arg = i;
        }
    std::set<std::size_t> out{arg};
    for (std::size_t i = 0; i < pdp.powers_db.size(); ++i)
        if (!(pdp.powers_db[i] < peak - threshold_db) && !(pdp.powers_db[i] < pdp.noise_floor_db)) out.insert(i);
    return out;
}

// sqrt(E[t^2] - E[t]^2), the raw-moment form.
inline double rmsds(const std::vector<std::pair<double, double>> &delay_power) {
    double p = 0, pt = 0, pt2 = 0;
    for (auto [t, w] : delay_power) {
        p += w;
        pt += w * t;
        pt2 += w * t * t;
    }
    const double v = pt2 / p - (pt / p) * (pt / p);
    return std::sqrt(std::max(0.0, v));
}

inline double mds(const std::vector<std::pair<double, double>> &delay_power) {
    double lo = 1e300, hi = -1e300;
    for (auto [t, w] : delay_power) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    return hi - lo;
}

// Omni PDP by explicit nested loops, keyed on the delay value itself.
inline std::map<double, double> omni_sum(const subthz::LocationMeasurement &loc) {
    std::map<double, double> acc;
    for (const auto &s : loc.sweeps) {
        double peak = -1e300;
        for (double p : s.powers_db) peak = std::max(peak, p);
        if (!(peak > s.noise_floor_db)) continue;
        for (std::size_t i = 0; i < s.powers_db.size(); ++i)
            if (s.powers_db[i] >= s.noise_floor_db)
                acc[s.delays_ns[i]] +=
                    std::pow(10.0, (s.powers_db[i] - loc.tx_antenna.gain_dbi - loc.rx_antenna.gain_dbi) / 10.0);
    }
    return acc;
}

// Number of connected marked components on a ring, by union-find.
inline std::size_t ring_components(const std::vector<bool> &marked) {
    const std::size_t n = marked.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        if (marked[i] && marked[j]) parent[find(i)] = find(j);
    }
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i)
        if (marked[i]) roots.insert(find(i));
    return roots.size();
}

struct Summary5 {
    double min, max, mean, median, p90;
};

// Sort, then pick nearest ranks with integer arithmetic: rank = ceil(p*N/100).
inline Summary5 summary(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    auto at = [&](std::size_t pct) {
        std::size_t rank = (pct * n + 99) / 100;
        if (rank == 0) rank = 1;
        return v[rank - 1];
    };
    double acc = 0;
    for (double x : v) acc += x;
    return {v.front(), v.back(), acc / static_cast<double>(n), at(50), at(90)};
}

// Random raw PDP on the 2 ns grid with a guaranteed detectable peak.
inline subthz::DirectionalPdp random_pdp(std::mt19937_64 &rng, std::size_t max_bins = 60) {
    std::uniform_int_distribution<std::size_t> len(1, max_bins);
    std::uniform_real_distribution<double> pw(-70.0, -20.0);
    subthz::DirectionalPdp p;
    p.noise_floor_db = -60.0;
    const std::size_t n = len(rng);
    const double t0 = 2.0 * std::uniform_int_distribution<int>(0, 50)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        p.delays_ns.push_back(t0 + 2.0 * static_cast<double>(i));
        p.powers_db.push_back(pw(rng));
    }
    p.powers_db[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = -15.0;
    return p;
}

}  // namespace oracle

#endif  // SUBTHZ_TESTS_ORACLES_HPP_
