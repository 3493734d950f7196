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


#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "subthz/report.hpp"
#include "subthz/synthesis.hpp"
#include "subthz/xpd.hpp"

using namespace subthz;
using Catch::Approx;

namespace {

LocationMeasurement as_vh(LocationMeasurement loc) {
    loc.polarization = Polarization::VH;
    return loc;
}

}  // namespace

TEST_CASE("directional XPD from paired V-V and V-H powers") {
    auto vv = fixture::location();
    vv.sweeps.push_back(fixture::sweep(0, 176, {{66.0, -60.0}}));
    auto vh = as_vh(vv);
    vh.sweeps[0] = fixture::sweep(0, 176, {{66.0, -88.3}});
    const auto x = directional_xpd(vv, vh);
    REQUIRE(x.size() == 1);
    CHECK(x[0].xpd_db == Approx(28.3).margin(1e-9));
    CHECK(x[0].path_class == PathClass::Boresight);
    CHECK(x[0].tx_id == "TX1");

    CHECK(directional_xpd(vv, as_vh(vv))[0].xpd_db == Approx(0.0).margin(1e-12));
}

TEST_CASE("directional XPD skips directions missing from either run") {
    auto vv = fixture::location();
    vv.sweeps.push_back(fixture::sweep(0, 176, {{66.0, -60.0}}));
    vv.sweeps.push_back(fixture::sweep(40, 216, {{80.0, -70.0}}));
    auto vh = as_vh(vv);
    vh.sweeps[1] = fixture::sweep(40, 216, {{80.0, fixture::kNoise - 3.0}});
    vh.sweeps.push_back(fixture::sweep(96, 96, {{90.0, -90.0}}));
    const auto x = directional_xpd(vv, vh);
    REQUIRE(x.size() == 1);
    CHECK(x[0].direction == Direction{0, 176});

    auto silent = as_vh(vv);
    for (auto &s : silent.sweeps) std::fill(s.powers_db.begin(), s.powers_db.end(), fixture::kNoise - 1.0);
    CHECK(directional_xpd(vv, silent).empty());
}

TEST_CASE("directional XPD input validation") {
    auto vv = fixture::location();
    vv.sweeps.push_back(fixture::sweep(0, 176, {{66.0, -60.0}}));
    CHECK_THROWS_AS(directional_xpd(vv, vv), validation_error);
    CHECK_THROWS_AS(directional_xpd(as_vh(vv), as_vh(vv)), validation_error);
    auto other = as_vh(vv);
    other.rx_id = "RX2";
    CHECK_THROWS_AS(directional_xpd(vv, other), validation_error);
}

TEST_CASE("directional XPD equals brute-force per-direction subtraction") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> xpd(22.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto vv = fixture::random_location(rng, trial, 15);
        auto vh = as_vh(vv);
        for (auto &s : vh.sweeps) {
            const double shift = xpd(rng);
            for (auto &p : s.powers_db) p -= shift;
        }
        std::map<Direction, double> expected;
        for (const auto &a : vv.sweeps)
            for (const auto &b : vh.sweeps)
                if (a.direction() == b.direction() && a.detectable() && b.detectable()) {
                    double pa = 0.0, pb = 0.0;
                    for (double p : a.powers_db)
                        if (p >= a.noise_floor_db) pa += db_to_linear(p);
                    for (double p : b.powers_db)
                        if (p >= b.noise_floor_db) pb += db_to_linear(p);
                    expected[a.direction()] = linear_to_db(pa) - linear_to_db(pb);
                }
        const auto got = directional_xpd(vv, vh);
        REQUIRE(got.size() == expected.size());
        for (const auto &x : got) REQUIRE(x.xpd_db == Approx(expected.at(x.direction)).margin(1e-9));
    }
}

TEST_CASE("path classes") {
    auto loc = fixture::location();
    loc.sweeps.push_back(fixture::sweep(0, 176, {{66.0, -60.0}}));
    // Wall on the RX side: energy arrives from 90 deg.
    loc.sweeps.push_back(fixture::sweep(24, 90, {{84.0, -68.0}}));
    CHECK(classify_path(loc, {0, 176}) == PathClass::Boresight);
    CHECK(classify_path(loc, {24, 90}) == PathClass::Reflection);
    CHECK_THROWS_AS(classify_path(loc, {200, 200}), validation_error);

    auto nlos = loc;
    nlos.los = false;
    CHECK(classify_path(nlos, {0, 176}) == PathClass::Reflection);
    CHECK(classify_path(nlos, {24, 90}) == PathClass::Reflection);
}

TEST_CASE("XPD summary of constructed sets") {
    // Symmetric +-std offsets give a set with exactly the prescribed population moments.
    auto constructed = [](PathClass cls, double mean, double sd, int pairs) {
        std::vector<DirectionalXpd> v;
        for (int k = 0; k < pairs; ++k)
            for (double s : {-1.0, 1.0}) {
                DirectionalXpd x;
                x.xpd_db = mean + s * sd;
                x.path_class = cls;
                v.push_back(x);
            }
        return v;
    };
    auto all = constructed(PathClass::Boresight, 26.2, 2.7, 5);
    const auto refl = constructed(PathClass::Reflection, 20.2, 4.3, 12);
    all.insert(all.end(), refl.begin(), refl.end());
    const auto s = xpd_summary(all);
    REQUIRE(s.size() == 2);
    CHECK(s[0].path_class == PathClass::Boresight);
    CHECK(s[0].mean_db == Approx(26.2).margin(1e-9));
    CHECK(s[0].std_db == Approx(2.7).margin(1e-9));
    CHECK(s[0].n == 10);
    CHECK(s[1].mean_db == Approx(20.2).margin(1e-9));
    CHECK(s[1].std_db == Approx(4.3).margin(1e-9));
    CHECK(s[1].n == 24);

    const auto only_refl = xpd_summary(refl);
    REQUIRE(only_refl.size() == 1);
    CHECK(only_refl[0].path_class == PathClass::Reflection);
    CHECK(xpd_summary(std::vector<DirectionalXpd>{}).empty());
}

TEST_CASE("XPD summary of a single sample") {
    DirectionalXpd x;
    x.xpd_db = 22.7;
    const auto s = xpd_summary(std::vector<DirectionalXpd>{x});
    REQUIRE(s.size() == 1);
    CHECK(s[0].std_db == 0.0);
    REQUIRE(s[0].cdf.size() == 1);
    CHECK(s[0].cdf[0] == std::pair<double, double>{22.7, 1.0});
}

TEST_CASE("XPD empirical CDF runs nondecreasing from 1/N to 1") {
    std::mt19937_64 rng(32);
    std::normal_distribution<double> law(20.0, 6.0);
    std::vector<DirectionalXpd> v(137);
    for (auto &x : v) x.xpd_db = law(rng);
    const auto cdf = xpd_summary(v)[0].cdf;
    REQUIRE(cdf.size() == v.size());
    CHECK(cdf.front().second == Approx(1.0 / 137.0));
    CHECK(cdf.back().second == 1.0);
    for (std::size_t k = 1; k < cdf.size(); ++k) {
        REQUIRE(cdf[k].first >= cdf[k - 1].first);
        REQUIRE(cdf[k].second > cdf[k - 1].second);
    }
}

TEST_CASE("XPD is invariant to transmit power and antenna gain") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        const auto vv = fixture::random_location(rng, trial, 10);
        auto vh = as_vh(vv);
        for (auto &s : vh.sweeps)
            for (auto &p : s.powers_db) p -= 20.0;
        const auto base = directional_xpd(vv, vh);
        auto vv2 = vv, vh2 = vh;
        vv2.tx_power_dbm = vh2.tx_power_dbm = 17.5;
        vv2.rx_antenna.gain_dbi = vh2.rx_antenna.gain_dbi = 21.0;
        const auto moved = directional_xpd(vv2, vh2);
        REQUIRE(moved.size() == base.size());
        for (std::size_t k = 0; k < base.size(); ++k) REQUIRE(moved[k].xpd_db == Approx(base[k].xpd_db).margin(1e-9));
    }
}

TEST_CASE("gross XPD lies between the directional extremes on synthetic campaigns") {
    SynthesisParams params;
    params.shadow_sigma_db = 0.0;  // omni V-V path loss then sits on the CI line
    // Deep noise floor: every rendered tap is measured in both polarisations.
    params.max_measurable_pl_db = 250.0;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto syn = synthesize_campaign(params, 13, seed);
        const auto split = split_by_polarization(syn.campaign);
        const auto xpds = campaign_directional_xpd(split);
        REQUIRE_FALSE(xpds.empty());
        const auto [lo, hi] = std::minmax_element(xpds.begin(), xpds.end(),
                                                  [](const auto &a, const auto &b) { return a.xpd_db < b.xpd_db; });
        const auto vv = path_loss_samples(split.vv, PathKind::Omni, true);
        const auto vh = path_loss_samples(split.vh, PathKind::Omni, true);
        const auto cix = fit_cix(vh, fit_ci(vv, params.carrier_hz), params.carrier_hz);
        CHECK(cix.xpd_db >= lo->xpd_db);
        CHECK(cix.xpd_db <= hi->xpd_db);

        // Per location the omni XPD is a power-weighted blend of its directions.
        for (std::size_t i = 0; i < split.vv.size(); ++i) {
            if (!split.vv[i].has_signal() || !split.vh[i].has_signal()) continue;
            const auto d = directional_xpd(split.vv[i], split.vh[i]);
            const double gross = omni_path_loss(split.vh[i]).pl_db - omni_path_loss(split.vv[i]).pl_db;
            double mn = 1e300, mx = -1e300;
            for (const auto &x : d) {
                mn = std::min(mn, x.xpd_db);
                mx = std::max(mx, x.xpd_db);
            }
            CHECK(gross >= mn - 1e-9);
            CHECK(gross <= mx + 1e-9);
        }
    }
}
