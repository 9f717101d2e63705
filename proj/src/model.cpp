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

#include "homdelay/model.hpp"

#include <cmath>
#include <string>

#include "homdelay/errors.hpp"

namespace homdelay {

void PhotonPairModel::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ConfigError("sigma must be positive and finite, got " + std::to_string(sigma));
  if (!(eta >= 0.0 && eta <= 1.0))
    throw ConfigError("eta must lie in [0, 1], got " + std::to_string(eta));
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ConfigError("gamma must lie in (0, 1], got " + std::to_string(gamma));
  if (!(omega0 >= 0.0) || !std::isfinite(omega0))
    throw ConfigError("omega0 must be non-negative, got " + std::to_string(omega0));
}

PhotonPairModel PhotonPairModel::from_tau(double tau_ps, double eta, double gamma,
                                          double omega0) {
  if (!(tau_ps > 0.0)) throw ConfigError("tau must be positive");
  PhotonPairModel m{0.5 / tau_ps, omega0, eta, gamma};
  m.validate();
  return m;
}

Outcome outcome_from_int(int delta) {
  if (delta == 1) return Outcome::bunching;
  if (delta == -1) return Outcome::coincidence;
  throw ConfigError("outcome tag must be +1 or -1, got " + std::to_string(delta));
}

double joint_spectral_density(const PhotonPairModel& model, double d_omega) {
  const double var4 = 4.0 * model.sigma * model.sigma;
  return std::exp(-d_omega * d_omega / var4) / std::sqrt(kPi * var4);
}

double prob_nonresolved(const PhotonPairModel& model, double delta_t, Outcome delta) {
  const double s = model.sigma * delta_t;
  const double visibility = model.eta * model.eta * std::exp(-s * s);
  return 0.5 * (1.0 + sign(delta) * visibility);
}

double conditional_outcome_prob(const PhotonPairModel& model, double delta_t, double d_omega,
                                Outcome delta) {
  const double e2 = model.eta * model.eta;
  // 1 - e2 cos(x) written through sin^2(x/2) so the coincidence side keeps
  // full relative precision near the fringe maxima.
  const double h = std::sin(0.5 * d_omega * delta_t);
  const double s2 = 2.0 * h * h;  // 1 - cos(x)
  if (delta == Outcome::bunching) return 0.5 * ((1.0 + e2) - e2 * s2);
  return 0.5 * ((1.0 - e2) + e2 * s2);
}

double prob_freq_resolved(const PhotonPairModel& model, double delta_t, double d_omega,
                          Outcome delta) {
  return joint_spectral_density(model, d_omega) *
         conditional_outcome_prob(model, delta_t, d_omega, delta);
}

double mean_frequency_density(const PhotonPairModel& model, double mean_freq) {
  const double s2 = model.sigma * model.sigma;
  const double d = mean_freq - model.omega0;
  return std::exp(-d * d / s2) / std::sqrt(kPi * s2);
}

double prob_joint_full(const PhotonPairModel& model, double delta_t, double mean_freq,
                       double d_omega, Outcome delta) {
  return mean_frequency_density(model, mean_freq) *
         prob_freq_resolved(model, delta_t, d_omega, delta);
}

}  // namespace homdelay
