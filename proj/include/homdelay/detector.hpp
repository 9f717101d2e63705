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

// Finite frequency resolution: the detector reports |dOmega| in bins of
// width 2 epsilon with a triangular response. Bin 0 is one-sided on
// [0, epsilon]; bin n > 0 covers [(n-1) epsilon, (n+1) epsilon] peaked at n epsilon.
//
// The resolved density is folded onto dOmega >= 0 (factor 2), so the binned
// probabilities over all bins and both outcomes sum to one up to tail mass.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "homdelay/model.hpp"
#include "homdelay/quadrature.hpp"

namespace homdelay {

struct BinnedDetectorSpec {
  double epsilon = 0.0069;   // half bin width, rad/ps
  std::uint32_t n_max = 1;   // highest bin index

  [[nodiscard]] double epsilon_prime(const PhotonPairModel& model) const {
    return epsilon / (2.0 * model.sigma);
  }
  /// Largest |dOmega| the detector can register.
  [[nodiscard]] double range() const { return (static_cast<double>(n_max) + 1.0) * epsilon; }

  void validate() const;

  /// Spec with n_max = ceil(5 sqrt(2) sigma / epsilon).
  static BinnedDetectorSpec for_model(const PhotonPairModel& model, double epsilon);
};

/// Required coverage of the dOmega density, in units of its standard deviation.
inline constexpr double kCoverageSigmas = 5.0;

[[nodiscard]] bool covers(const BinnedDetectorSpec& spec, const PhotonPairModel& model);

/// Throws CoverageError unless the range spans 5 sqrt(2) sigma.
void validate_coverage(const BinnedDetectorSpec& spec, const PhotonPairModel& model);

/// Triangular response of bin n at x = |dOmega| / epsilon.
double kernel(std::uint32_t n, double x);

/// Delay-dependent pieces of one bin at a fixed delay.
struct BinProbabilities {
  double bunching = 0.0;
  double coincidence = 0.0;
  /// S_n = int k_n C(w) w sin(w dt) dw; d/d(dt) of P_{n,delta} is -delta eta^2 S_n.
  double slope = 0.0;
};

/// Quadrature defaults for single-bin integrals.
inline constexpr QuadratureOptions kBinQuadrature{1e-12, 0.0,
                                                  std::numeric_limits<double>::infinity(), 10};

/// Probabilities and slope for one bin; no coverage check.
BinProbabilities bin_probabilities(const PhotonPairModel& model, const BinnedDetectorSpec& spec,
                                   double delta_t, std::uint32_t n,
                                   const QuadratureOptions& quad = kBinQuadrature);

/// Delay-independent bin mass int k_n C dw (half of P_{n,+} + P_{n,-}).
double bin_mass(const PhotonPairModel& model, const BinnedDetectorSpec& spec, std::uint32_t n,
                const QuadratureOptions& quad = kBinQuadrature);

/// int k_n C(w) sin^2(w dt / 2) dw, the delay-dependent part of P_{n,delta}.
double bin_beat_term(const PhotonPairModel& model, const BinnedDetectorSpec& spec, double delta_t,
                     std::uint32_t n, const QuadratureOptions& quad = kBinQuadrature);

/// P_{n,delta}(dt). Throws CoverageError if the spec fails validate_coverage,
/// ConfigError if n > n_max.
double binned_prob(const PhotonPairModel& model, const BinnedDetectorSpec& spec, double delta_t,
                   std::uint32_t n, Outcome delta);

/// Stochastic bin assignment: with x = |dOmega| / epsilon between bins n and
/// n+1, returns n when random_draw <= kernel(n, x), else n+1. Returns nullopt
/// when the record falls outside the detector.
std::optional<std::uint32_t> try_assign_bin(const BinnedDetectorSpec& spec, double d_omega,
                                            double random_draw);

/// As try_assign_bin, throwing RangeError for out-of-range records.
std::uint32_t assign_bin(const BinnedDetectorSpec& spec, double d_omega, double random_draw);

/// Ceiling 1/epsilon on delays that one bin can still resolve.
double max_unambiguous_delay(const BinnedDetectorSpec& spec);

/// Time-of-flight spectrometer: dispersion maps frequency offsets to arrival times.
struct TofSpec {
  double gdd = 909.0;                 // group delay dispersion, ps^2
  double ref_freq = 2.0 * kPi * 193;  // rad/ps

  void validate() const;
};

/// dOmega = arrival-time difference / gdd.
double tof_to_d_omega(const TofSpec& spec, double arrival_time_diff);

/// Frequency resolution of a single raw event given the detector timing jitter.
double tof_resolution(const TofSpec& spec, double jitter_ps);

}  // namespace homdelay
