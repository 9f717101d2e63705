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

#include <cmath>
#include <cstddef>
#include <vector>

#include "homdelay/model.hpp"
#include "homdelay/units.hpp"

namespace fixtures {

// sigma / 2 pi = 81 GHz.
inline homdelay::PhotonPairModel model81(double eta = 1.0) {
  homdelay::PhotonPairModel m;
  m.sigma = homdelay::units::ghz_to_radps(81.0);
  m.omega0 = homdelay::units::thz_to_radps(193.0);
  m.eta = eta;
  return m;
}

// sigma = 0.5102 rad/ps, as quoted alongside tau = 0.98 ps.
inline homdelay::PhotonPairModel model_sigma(double sigma, double eta = 1.0) {
  homdelay::PhotonPairModel m;
  m.sigma = sigma;
  m.omega0 = homdelay::units::thz_to_radps(193.0);
  m.eta = eta;
  return m;
}

inline homdelay::PhotonPairModel model_tau(double tau, double eta = 1.0) {
  return homdelay::PhotonPairModel::from_tau(tau, eta, 1.0, homdelay::units::thz_to_radps(193.0));
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

}  // namespace fixtures
