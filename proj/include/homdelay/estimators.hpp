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

// Delay estimators: the closed-form non-resolved estimator and the
// frequency-resolved maximum-likelihood estimators (ideal and binned).
//
// The likelihood is even in the delay, so every grid covers dt >= 0 only and
// estimates are reported as non-negative delays.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "homdelay/detector.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

inline constexpr double kProbabilityFloor = 1e-12;

struct DelayGrid {
  double t_min = 0.0;              // ps
  double t_max = 20.0;             // ps
  double coarse_step = 0.098;      // ps
  double refine_step = 1e-4;       // ps (0.1 fs)
  double refine_half_width = 0.196;
  /// Scan the whole refine window at refine_step instead of zooming by decades.
  bool exhaustive_refine = false;

  void validate() const;
  /// Additionally requires t_max <= 1/epsilon.
  void validate_for(const BinnedDetectorSpec& spec) const;

  /// coarse = tau/10, refine = 0.1 fs, half width = 2 coarse steps.
  static DelayGrid defaults_for(const PhotonPairModel& model, double t_max);
};

enum class FailureReason { b_le_c, b_zero, q_non_positive, log_arg_below_one, empty_sample };

std::string_view to_string(FailureReason reason);

struct GridDiagnostics {
  std::size_t coarse_points = 0;
  std::size_t coarse_argmax = 0;
  std::size_t refine_levels = 0;
  std::size_t refine_argmax = 0;  // index within the last refine level
};

struct EstimateResult {
  std::optional<double> value;            // ps
  std::optional<FailureReason> failure;
  double loglik_at_max = 0.0;             // nats
  GridDiagnostics grid;

  [[nodiscard]] bool ok() const { return value.has_value(); }

  static EstimateResult success(double v, double loglik = 0.0) {
    EstimateResult r;
    r.value = v;
    r.loglik_at_max = loglik;
    return r;
  }
  static EstimateResult failed(FailureReason reason) {
    EstimateResult r;
    r.failure = reason;
    return r;
  }
};

struct OutcomeCounts {
  std::size_t bunching = 0;
  std::size_t coincidence = 0;
};

OutcomeCounts count_outcomes(RecordSpan records);

/// Closed-form non-resolved estimate sqrt(log(eta^2 q)) / sigma with
/// q = (nB + nC) / (nB - nC). Failures are returned, never thrown.
EstimateResult estimate_nonresolved(std::size_t n_bunching, std::size_t n_coincidence,
                                    const PhotonPairModel& model);

/// Sum of log max((1 + delta eta^2 cos(dw dt)) / 2, floor). Throws EmptySample.
double loglik_resolved(RecordSpan records, const PhotonPairModel& model, double delta_t);

/// Log-likelihood of the full (W, dOmega, delta) density. Differs from
/// loglik_resolved by a delay-independent constant.
double loglik_joint_full(RecordSpan records, const PhotonPairModel& model, double delta_t);

/// loglik_resolved on the uniform grid t0 + k step, k < out.size().
void scan_loglik_resolved(RecordSpan records, const PhotonPairModel& model, double t0, double step,
                          std::span<double> out);

/// Fills out[k] with the objective at t0 + k step.
using GridObjective = std::function<void(double t0, double step, std::span<double> out)>;

/// Coarse sweep then refinement around the coarse argmax. Ties go to the smaller delay.
EstimateResult maximize_on_grid(const DelayGrid& grid, const GridObjective& objective);

EstimateResult estimate_resolved(RecordSpan records, const PhotonPairModel& model,
                                 const DelayGrid& grid);

/// Binned probabilities P_{n,delta}(dt), memoized per delay. Safe to share
/// between threads.
class BinnedLikelihood {
 public:
  BinnedLikelihood(const PhotonPairModel& model, const BinnedDetectorSpec& spec);

  [[nodiscard]] const PhotonPairModel& model() const { return model_; }
  [[nodiscard]] const BinnedDetectorSpec& spec() const { return spec_; }

  /// max(P_{n,delta}(dt), floor).
  [[nodiscard]] double probability(std::uint32_t n, Outcome delta, double delta_t) const;

  /// Sum over (n, delta) of counts * log P at t0 + k step. `counts` is indexed
  /// [2 n + (delta == coincidence)].
  void scan(std::span<const std::size_t> counts, double t0, double step,
            std::span<double> out) const;

 private:
  std::shared_ptr<const std::vector<double>> beat_terms(double delta_t) const;

  static constexpr std::size_t kMaxCachedDelays = 16384;

  PhotonPairModel model_;
  BinnedDetectorSpec spec_;
  std::vector<double> mass_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const std::vector<double>>> beat_cache_;
};

/// Per-(bin, outcome) counts; throws ConfigError on a missing or out-of-range bin.
std::vector<std::size_t> bin_counts(RecordSpan records, const BinnedDetectorSpec& spec);

EstimateResult estimate_resolved_binned(RecordSpan records, const BinnedLikelihood& likelihood,
                                        const DelayGrid& grid);

EstimateResult estimate_resolved_binned(RecordSpan records, const PhotonPairModel& model,
                                        const BinnedDetectorSpec& spec, const DelayGrid& grid);

}  // namespace homdelay
