// Copyright 2026 The homdelay Authors
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

// Conversions between "ordinary frequency" in GHz (the f = omega / 2pi
// convention used on the command line) and the internal rad/ps.

#include "homdelay/model.hpp"

namespace homdelay::units {

inline constexpr double ghz_to_radps(double ghz) { return 2.0 * kPi * ghz / 1000.0; }
inline constexpr double radps_to_ghz(double radps) { return radps * 1000.0 / (2.0 * kPi); }
inline constexpr double thz_to_radps(double thz) { return 2.0 * kPi * thz; }

inline constexpr double fs_to_ps(double fs) { return fs * 1e-3; }
inline constexpr double ps_to_fs(double ps) { return ps * 1e3; }
inline constexpr double ps_to_as(double ps) { return ps * 1e6; }

}  // namespace homdelay::units
