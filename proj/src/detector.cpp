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

#include "homdelay/detector.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "homdelay/errors.hpp"

namespace homdelay {

namespace {

// Sum of int k_n(w / eps) g(w) dw over the (one or two) flanks of bin n.
template <class G>
double integrate_bin(std::uint32_t n, double eps, G&& g, const QuadratureOptions& quad) {
  const double c = static_cast<double>(n) * eps;
  auto falling = [&](double w) { return (1.0 - (w - c) / eps) * g(w); };
  double total = integrate(falling, c, c + eps, quad).value;
  if (n > 0) {
    auto rising = [&](double w) { return (1.0 + (w - c) / eps) * g(w); };
    total += integrate(rising, c - eps, c, quad).value;
  }
  return total;
}

}  // namespace

void BinnedDetectorSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ConfigError("detector epsilon must be positive, got " + std::to_string(epsilon));
  if (n_max < 1) throw ConfigError("detector n_max must be at least 1");
}

BinnedDetectorSpec BinnedDetectorSpec::for_model(const PhotonPairModel& model, double epsilon) {
  BinnedDetectorSpec spec{epsilon, 1};
  if (!(epsilon > 0.0)) throw ConfigError("detector epsilon must be positive");
  const double needed = kCoverageSigmas * std::sqrt(2.0) * model.sigma / epsilon;
  spec.n_max = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(needed)));
  return spec;
}

bool covers(const BinnedDetectorSpec& spec, const PhotonPairModel& model) {
  return spec.range() >= kCoverageSigmas * std::sqrt(2.0) * model.sigma;
}

void validate_coverage(const BinnedDetectorSpec& spec, const PhotonPairModel& model) {
  spec.validate();
  if (!covers(spec, model)) {
    std::ostringstream msg;
    msg << "detector range " << spec.range() << " rad/ps covers less than "
        << kCoverageSigmas << " sqrt(2) sigma = "
        << kCoverageSigmas * std::sqrt(2.0) * model.sigma << " rad/ps";
    throw CoverageError(msg.str());
  }
}

double kernel(std::uint32_t n, double x) {
  if (x < 0.0) return 0.0;
  if (n == 0) return x <= 1.0 ? 1.0 - x : 0.0;
  const double d = std::abs(x - static_cast<double>(n));
  return d <= 1.0 ? 1.0 - d : 0.0;
}

double bin_mass(const PhotonPairModel& model, const BinnedDetectorSpec& spec, std::uint32_t n,
                const QuadratureOptions& quad) {
  auto density = [&](double w) { return joint_spectral_density(model, w); };
  return integrate_bin(n, spec.epsilon, density, quad);
}

double bin_beat_term(const PhotonPairModel& model, const BinnedDetectorSpec& spec, double delta_t,
                     std::uint32_t n, const QuadratureOptions& quad) {
  auto beat = [&](double w) {
    const double h = std::sin(0.5 * w * delta_t);
    return joint_spectral_density(model, w) * h * h;
  };
  return integrate_bin(n, spec.epsilon, beat, quad);
}

BinProbabilities bin_probabilities(const PhotonPairModel& model, const BinnedDetectorSpec& spec,
                                   double delta_t, std::uint32_t n,
                                   const QuadratureOptions& quad) {
  const double e2 = model.eta * model.eta;
  const double mass = bin_mass(model, spec, n, quad);
  const double beat = bin_beat_term(model, spec, delta_t, n, quad);
  auto slope_integrand = [&](double w) {
    return joint_spectral_density(model, w) * w * std::sin(w * delta_t);
  };
  BinProbabilities out;
  out.bunching = (1.0 + e2) * mass - 2.0 * e2 * beat;
  out.coincidence = (1.0 - e2) * mass + 2.0 * e2 * beat;
  out.slope = integrate_bin(n, spec.epsilon, slope_integrand, quad);
  return out;
}

double binned_prob(const PhotonPairModel& model, const BinnedDetectorSpec& spec, double delta_t,
                   std::uint32_t n, Outcome delta) {
  validate_coverage(spec, model);
  if (n > spec.n_max)
    throw ConfigError("bin index " + std::to_string(n) + " exceeds n_max " +
                      std::to_string(spec.n_max));
  const double e2 = model.eta * model.eta;
  const double mass = bin_mass(model, spec, n);
  const double beat = bin_beat_term(model, spec, delta_t, n);
  const double p = delta == Outcome::bunching ? (1.0 + e2) * mass - 2.0 * e2 * beat
                                              : (1.0 - e2) * mass + 2.0 * e2 * beat;
  return std::max(p, 0.0);
}

std::optional<std::uint32_t> try_assign_bin(const BinnedDetectorSpec& spec, double d_omega,
                                            double random_draw) {
  const double x = std::abs(d_omega) / spec.epsilon;
  if (!(x <= static_cast<double>(spec.n_max) + 1.0)) return std::nullopt;
  const double lower = std::floor(x);
  const double frac = x - lower;
  auto n = static_cast<std::uint32_t>(lower);
  // Ties (random_draw == 1 - frac) go to the lower bin.
  if (random_draw > 1.0 - frac) ++n;
  if (n > spec.n_max) return std::nullopt;
  return n;
}

std::uint32_t assign_bin(const BinnedDetectorSpec& spec, double d_omega, double random_draw) {
  if (auto n = try_assign_bin(spec, d_omega, random_draw)) return *n;
  std::ostringstream msg;
  msg << "|dOmega| = " << std::abs(d_omega) << " rad/ps lies outside the detector range "
      << spec.range() << " rad/ps";
  throw RangeError(msg.str());
}

double max_unambiguous_delay(const BinnedDetectorSpec& spec) { return 1.0 / spec.epsilon; }

void TofSpec::validate() const {
  if (gdd == 0.0 || !std::isfinite(gdd)) throw ConfigError("group delay dispersion must be non-zero");
}

double tof_to_d_omega(const TofSpec& spec, double arrival_time_diff) {
  return arrival_time_diff / spec.gdd;
}

double tof_resolution(const TofSpec& spec, double jitter_ps) {
  return jitter_ps / std::abs(spec.gdd);
}

}  // namespace homdelay
