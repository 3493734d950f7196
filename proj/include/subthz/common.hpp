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

#ifndef SUBTHZ_COMMON_HPP_
#define SUBTHZ_COMMON_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subthz {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kReferenceDistanceM = 1.0;     // d0 of the CI model

// Error hierarchy. The CLI maps each family onto a distinct exit code.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the offending file and 1-based line.
struct parse_error : error {
    parse_error(std::string file, std::size_t line, const std::string &what)
        : error(file + ":" + std::to_string(line) + ": " + what), file_(std::move(file)), line_(line) {}
    const std::string &file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

// A domain invariant does not hold. Names the field that failed.
struct validation_error : error {
    validation_error(std::string field, const std::string &what)
        : error(field + ": " + what), field_(std::move(field)) {}
    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

// Nothing above the noise floor / threshold to work with.
struct no_signal_error : error {
    using error::error;
};

// Least-squares fit with no information (all d == d0, too few samples, ...).
struct degenerate_fit_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Maps any angle onto [0, 360).
inline double wrap_360(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r -= 360.0;
    return r;
}

// Maps any angle onto (-180, 180].
inline double wrap_180(double deg) {
    double r = wrap_360(deg);
    if (r > 180.0) r -= 360.0;
    return r;
}

// Five-number summary used by the campaign tables.
struct Summary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double p90 = 0.0;
    std::size_t n = 0;
};

// Nearest-rank percentile of an already sorted sample: the value at rank
// ceil(p/100 * N), rank clamped to [1, N].
inline double nearest_rank(std::span<const double> sorted, double percent) {
    if (sorted.empty()) throw validation_error("percentile", "empty sample");
    auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

inline Summary summarize(std::vector<double> values) {
    if (values.empty()) throw validation_error("summary", "empty sample");
    std::sort(values.begin(), values.end());
    Summary s;
    s.n = values.size();
    s.min = values.front();
    s.max = values.back();
    double acc = 0.0;
    for (double v : values) acc += v;
    s.mean = acc / static_cast<double>(values.size());
    s.median = nearest_rank(values, 50.0);
    s.p90 = nearest_rank(values, 90.0);
    return s;
}

}  // namespace subthz

#endif  // SUBTHZ_COMMON_HPP_
