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

// Experiment orchestration: repeat sweeps over delays, the micro-shift
// resolution experiment and Allan-variance analysis.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homdelay/detector.hpp"
#include "homdelay/estimators.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

enum class EstimatorKind { nr, fr, fr_binned };

std::string_view to_string(EstimatorKind kind);
/// Accepts "NR", "FR", "FRbinned" (case-insensitive).
EstimatorKind estimator_from_string(std::string_view name);

/// Piecewise-linear eta(dt) through (delay_ps, eta) knots.
class EtaTable {
 public:
  EtaTable() = default;
  explicit EtaTable(std::vector<std::pair<double, double>> knots);

  [[nodiscard]] bool covers(double delta_t) const;
  /// Throws ConfigError outside the knot range.
  [[nodiscard]] double operator()(double delta_t) const;
  [[nodiscard]] const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

struct SweepConfig {
  std::vector<double> delays;  // ps, ascending
  std::size_t repeats = 100;
  std::size_t samples = 1000;  // per repeat
  std::vector<EstimatorKind> estimators{EstimatorKind::nr, EstimatorKind::fr};
  PhotonPairModel model;
  std::optional<EtaTable> eta_table;
  std::optional<BinnedDetectorSpec> detector;  // required for FRbinned
  /// Upper edge of the likelihood grid; default max(20, 2 max(delays)) ps.
  std::optional<double> t_max;
  std::uint64_t seed = 1;
  std::optional<std::string> report_path;

  void validate() const;
  [[nodiscard]] double eta_at(double delta_t) const;
  [[nodiscard]] DelayGrid grid() const;
  /// Seed of repeat `repeat` at delay index `delay_index`.
  [[nodiscard]] std::uint64_t repeat_seed(std::size_t delay_index, std::size_t repeat) const;
};

struct EstimatorStats {
  EstimatorKind estimator = EstimatorKind::nr;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::map<FailureReason, std::size_t> failure_reasons;
  double failure_fraction = 0.0;
  // Moments over successful estimates; the variance is the population variance.
  std::optional<double> mean;
  std::optional<double> stddev;
  std::optional<double> standard_error;
  std::optional<double> bias;
  std::optional<double> mse;
  /// 1 / (N var), only when the failure fraction is below one half.
  std::optional<double> fisher_exp;
  double fisher = 0.0;            // per sample, theoretical
  std::optional<double> crb;      // ps^2, absent when fisher == 0
};

struct DelayReport {
  double delta_t = 0.0;
  double eta = 1.0;
  std::vector<EstimatorStats> estimators;
  /// MSE_NR / MSE_FR when both are available.
  std::optional<double> mse_ratio;

  [[nodiscard]] const EstimatorStats* find(EstimatorKind kind) const;
};

struct SweepReport {
  SweepConfig config;
  std::vector<DelayReport> points;
  std::vector<std::string> warnings;
};

SweepReport run_sweep(const SweepConfig& config);

/// Aggregates estimates of a known delay into moments and failure counts.
EstimatorStats summarize_estimates(EstimatorKind kind, std::span<const EstimateResult> results,
                                   double true_delay, std::size_t samples);

struct MicroShiftConfig {
  PhotonPairModel model;
  double base = 6.567;    // ps
  double shift = 0.003;   // ps
  std::size_t samples = 7'900'000;
  std::uint64_t seed = 1;
  std::optional<DelayGrid> grid;  // default: [0, 2 base] with the model's default steps
  /// Cumulative sample counts at which to record the trace; default decades plus N.
  std::vector<std::size_t> trace_points;

  void validate() const;
};

struct TracePoint {
  std::size_t samples = 0;
  double base_estimate = 0.0;
  double shifted_estimate = 0.0;
};

struct MicroShiftReport {
  double base_estimate = 0.0;
  double shifted_estimate = 0.0;
  double shift_estimate = 0.0;
  double fisher = 0.0;        // at the base delay
  double estimate_std = 0.0;  // CRB std of one estimate
  double combined_std = 0.0;  // sqrt(2) estimate_std
  /// True when the requested shift is below 3 combined std.
  bool insufficient_samples = false;
  std::vector<TracePoint> trace;
};

/// Base set uses `seed`, the shifted set `seed + 1`.
MicroShiftReport micro_shift_experiment(const MicroShiftConfig& config);

struct AllanPoint {
  std::size_t cluster_size = 0;
  std::size_t clusters = 0;
  double variance = 0.0;
};

/// Two-sample variance of disjoint cluster means. Throws InsufficientData when
/// a cluster size leaves fewer than two clusters.
std::vector<AllanPoint> allan_variance(std::span<const double> series,
                                       std::span<const std::size_t> cluster_sizes);

/// Maps outcomes to +1 (bunching) / -1 (coincidence).
std::vector<double> outcome_series(RecordSpan records);

}  // namespace homdelay
