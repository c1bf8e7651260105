// Copyright 2026 The kerrfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <numbers>

// External files speak ordinary frequency (MHz, kHz) and nanoseconds; the
// integrators work in angular frequency (rad/s) and seconds.
namespace kerrfb::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double mhz_to_rad_per_s(double mhz) { return two_pi * mhz * 1e6; }
constexpr double rad_per_s_to_mhz(double w) { return w / (two_pi * 1e6); }
constexpr double khz_to_rad_per_s(double khz) { return two_pi * khz * 1e3; }
constexpr double rad_per_s_to_khz(double w) { return w / (two_pi * 1e3); }
constexpr double ns_to_s(double ns) { return ns * 1e-9; }
constexpr double s_to_ns(double s) { return s * 1e9; }
constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }

}  // namespace kerrfb::units
