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


#ifndef SUBTHZ_XPD_HPP_
#define SUBTHZ_XPD_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subthz/common.hpp"
#include "subthz/measurement.hpp"
#include "subthz/pathloss.hpp"

namespace subthz {

enum class PathClass { Boresight, Reflection };

inline std::string_view to_string(PathClass c) { return c == PathClass::Boresight ? "boresight" : "reflection"; }

struct DirectionalXpd {
    Direction direction;
    double xpd_db = 0.0;
    PathClass path_class = PathClass::Reflection;
    std::string tx_id;
    std::string rx_id;
};

// Reflections are not split by order.
inline PathClass classify_path(const LocationMeasurement &loc, const Direction &dir) {
    const auto classes = classify_directions(loc);
    const auto it = classes.find(dir);
    if (it == classes.end()) throw validation_error("direction", "not a detectable direction of this location");
    return it->second == PathKind::DirB ? PathClass::Boresight : PathClass::Reflection;
}

// XPD per direction detectable in both runs, as PL_VH - PL_VV so that the
// link-budget terms of each run cancel separately.
inline std::vector<DirectionalXpd> directional_xpd(const LocationMeasurement &vv, const LocationMeasurement &vh) {
    if (vv.polarization != Polarization::VV) throw validation_error("polarization", "first argument must be V-V");
    if (vh.polarization != Polarization::VH) throw validation_error("polarization", "second argument must be V-H");
    if (vv.tx_id != vh.tx_id || vv.rx_id != vh.rx_id || vv.tx_pos_m != vh.tx_pos_m || vv.rx_pos_m != vh.rx_pos_m)
        throw validation_error("location", "V-V and V-H measurements describe different geometries");

    const auto classes = classify_directions(vv);
    std::map<Direction, double> pl_vv;
    for (const auto &s : directional_path_loss(vv)) pl_vv.emplace(*s.direction, s.pl_db);

    std::vector<DirectionalXpd> out;
    for (const auto &s : directional_path_loss(vh)) {
        const auto it = pl_vv.find(*s.direction);
        if (it == pl_vv.end()) continue;
        DirectionalXpd x;
        x.direction = *s.direction;
        x.xpd_db = s.pl_db - it->second;
        x.path_class = classes.at(x.direction) == PathKind::DirB ? PathClass::Boresight : PathClass::Reflection;
        x.tx_id = vv.tx_id;
        x.rx_id = vv.rx_id;
        out.push_back(std::move(x));
    }
    return out;
}

struct XpdClassSummary {
    PathClass path_class = PathClass::Boresight;
    double mean_db = 0.0;
    double std_db = 0.0;  // population
    std::size_t n = 0;
    std::vector<std::pair<double, double>> cdf;  // (xpd_db, k/N), sorted
};

// Per-class mean/std and empirical CDF. Classes without samples are omitted.
inline std::vector<XpdClassSummary> xpd_summary(std::span<const DirectionalXpd> xpds) {
    std::vector<XpdClassSummary> out;
    for (PathClass cls : {PathClass::Boresight, PathClass::Reflection}) {
        std::vector<double> v;
        for (const auto &x : xpds)
            if (x.path_class == cls) v.push_back(x.xpd_db);
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        XpdClassSummary s;
        s.path_class = cls;
        s.n = v.size();
        double acc = 0.0;
        for (double x : v) acc += x;
        s.mean_db = acc / static_cast<double>(s.n);
        double var = 0.0;
        for (double x : v) var += (x - s.mean_db) * (x - s.mean_db);
        s.std_db = std::sqrt(var / static_cast<double>(s.n));
        for (std::size_t k = 0; k < v.size(); ++k)
            s.cdf.emplace_back(v[k], static_cast<double>(k + 1) / static_cast<double>(s.n));
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace subthz

#endif  // SUBTHZ_XPD_HPP_
