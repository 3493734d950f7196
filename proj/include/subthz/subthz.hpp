// SPDX-License-Identifier: Apache-2.0
// Umbrella header.

#ifndef SUBTHZ_SUBTHZ_HPP_
#define SUBTHZ_SUBTHZ_HPP_

#include "subthz/angular.hpp"
#include "subthz/common.hpp"
#include "subthz/delay.hpp"
#include "subthz/io.hpp"
#include "subthz/measurement.hpp"
#include "subthz/pathloss.hpp"
#include "subthz/report.hpp"
#include "subthz/synthesis.hpp"
#include "subthz/xpd.hpp"

#endif  // SUBTHZ_SUBTHZ_HPP_
