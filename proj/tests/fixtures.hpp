// SPDX-License-Identifier: Apache-2.0
#ifndef SUBTHZ_TESTS_FIXTURES_HPP_
#define SUBTHZ_TESTS_FIXTURES_HPP_

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "subthz/measurement.hpp"

namespace fixture {

inline constexpr double kNoise = -110.0;

// LOS location: TX at origin, RX along +x, so boresight is (0 deg, 180 deg).
inline subthz::LocationMeasurement location(double distance_m = 20.0, bool los = true) {
    subthz::LocationMeasurement loc;
    loc.tx_id = "TX1";
    loc.rx_id = "RX1";
    const double dz = 1.5;
    loc.tx_pos_m = {0, 0, 3.0};
    loc.rx_pos_m = {std::sqrt(distance_m * distance_m - dz * dz), 0, 1.5};
    loc.los = los;
    return loc;
}

// Sweep whose listed taps sit on a contiguous 2 ns grid starting at delays[0];
// filler bins are written below the noise floor.
inline subthz::DirectionalPdp sweep(double tx_az, double rx_az, const std::vector<std::pair<double, double>> &taps,
                                    double noise = kNoise) {
    subthz::DirectionalPdp p;
    p.tx_az_deg = tx_az;
    p.rx_az_deg = rx_az;
    p.noise_floor_db = noise;
    double lo = 1e300, hi = -1e300;
    for (auto [t, _] : taps) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    for (double t = lo; t <= hi + 1e-9; t += 2.0) {
        double pw = noise - 20.0;
        for (auto [tt, pp] : taps)
            if (std::abs(tt - t) < 1e-9) pw = pp;
        p.delays_ns.push_back(t);
        p.powers_db.push_back(pw);
    }
    return p;
}

// Random location with up to `max_dirs` distinct pointing pairs on the 8 deg grid.
inline subthz::LocationMeasurement random_location(std::mt19937_64 &rng, int idx, std::size_t max_dirs = 12) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto loc = location(6.3 + 33.3 * u(rng), u(rng) < 0.85);
    loc.tx_id = "TX" + std::to_string(idx % 5);
    loc.rx_id = "RX" + std::to_string(idx);
    const std::size_t n_dirs = 1 + std::uniform_int_distribution<std::size_t>(0, max_dirs - 1)(rng);
    std::set<std::pair<int, int>> used;
    for (std::size_t d = 0; d < n_dirs; ++d) {
        const int a = std::uniform_int_distribution<int>(0, 44)(rng);
        const int b = std::uniform_int_distribution<int>(0, 44)(rng);
        if (!used.insert({a, b}).second) continue;
        subthz::DirectionalPdp p;
        p.tx_az_deg = 8.0 * a;
        p.rx_az_deg = subthz::wrap_360(4.0 + 8.0 * b);
        p.noise_floor_db = -100.0;
        const int len = std::uniform_int_distribution<int>(1, 40)(rng);
        const double t0 = 2.0 * std::uniform_int_distribution<int>(10, 200)(rng);
        const double peak = -40.0 - 40.0 * u(rng);
        for (int i = 0; i < len; ++i) {
            p.delays_ns.push_back(t0 + 2.0 * i);
            p.powers_db.push_back(peak - 50.0 * u(rng));
        }
        p.powers_db[std::uniform_int_distribution<std::size_t>(0, p.powers_db.size() - 1)(rng)] = peak;
        loc.sweeps.push_back(p);
    }
    return loc;
}

}  // namespace fixture

#endif
