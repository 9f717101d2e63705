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

// Photon-pair state and the ideal (infinite resolution) outcome probabilities
// for two-photon interference at a balanced beam splitter.
//
// Units: times in ps, angular frequencies in rad/ps. No 2*pi factors are
// hidden anywhere below; conversions from GHz live in units.hpp.

#include <cstdint>
#include <optional>
#include <span>

namespace homdelay {

inline constexpr double kPi = 3.14159265358979323846;

/// Gaussian single-photon spectra with bandwidth sigma, centred on omega0.
struct PhotonPairModel {
  double sigma = 0.5;      // rad/ps
  double omega0 = 0.0;     // rad/ps
  double eta = 1.0;        // indistinguishability
  double gamma = 1.0;      // per-photon detection efficiency

  /// Temporal bandwidth; sigma * tau == 1/2.
  [[nodiscard]] double tau() const noexcept { return 0.5 / sigma; }

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  [[nodiscard]] PhotonPairModel with_eta(double new_eta) const {
    PhotonPairModel copy = *this;
    copy.eta = new_eta;
    return copy;
  }

  static PhotonPairModel from_tau(double tau_ps, double eta, double gamma = 1.0,
                                  double omega0 = 0.0);
};

/// Port outcome: both photons in one port, or one in each.
enum class Outcome : std::int8_t { bunching = +1, coincidence = -1 };

[[nodiscard]] constexpr int sign(Outcome o) noexcept { return static_cast<int>(o); }

/// Maps a raw +1/-1 integer; throws ConfigError for anything else.
Outcome outcome_from_int(int delta);

inline constexpr Outcome kOutcomes[] = {Outcome::bunching, Outcome::coincidence};

struct DetectionRecord {
  Outcome delta = Outcome::bunching;
  double d_omega = 0.0;                     // omega1 - omega2, rad/ps
  std::optional<double> mean_freq;          // W = (omega1 + omega2) / 2
  std::optional<std::uint32_t> bin_index;   // set by a binned detector only

  [[nodiscard]] std::optional<double> omega1() const {
    if (!mean_freq) return std::nullopt;
    return *mean_freq + 0.5 * d_omega;
  }
  [[nodiscard]] std::optional<double> omega2() const {
    if (!mean_freq) return std::nullopt;
    return *mean_freq - 0.5 * d_omega;
  }
};

using RecordSpan = std::span<const DetectionRecord>;

/// C(dOmega): density of the frequency difference, Gaussian with variance 2 sigma^2.
double joint_spectral_density(const PhotonPairModel& model, double d_omega);

/// Non-resolved outcome probability (1 + delta eta^2 exp(-sigma^2 dt^2)) / 2.
double prob_nonresolved(const PhotonPairModel& model, double delta_t, Outcome delta);

/// Frequency-resolved density C(dw)/2 (1 + delta eta^2 cos(dw dt)), post-selected.
double prob_freq_resolved(const PhotonPairModel& model, double delta_t, double d_omega,
                          Outcome delta);

/// Conditional bunching/coincidence probability given dOmega; the part of the
/// resolved density that depends on the delay.
double conditional_outcome_prob(const PhotonPairModel& model, double delta_t, double d_omega,
                                Outcome delta);

/// Density of the mean frequency W: Gaussian around omega0 with variance sigma^2/2.
double mean_frequency_density(const PhotonPairModel& model, double mean_freq);

/// Full density over (W, dOmega, delta). Factorizes as G(W) * prob_freq_resolved.
double prob_joint_full(const PhotonPairModel& model, double delta_t, double mean_freq,
                       double d_omega, Outcome delta);

}  // namespace homdelay
