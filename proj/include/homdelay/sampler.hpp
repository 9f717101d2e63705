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

// Seeded Monte Carlo generation of detection records. Each event is drawn in
// two exact stages: dOmega from its Gaussian marginal, then the port outcome
// from the conditional (1 + delta eta^2 cos(dOmega dt)) / 2.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "homdelay/detector.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

enum class LossMode { post_selected, physical };

struct SamplerConfig {
  PhotonPairModel model;
  double true_delay = 0.0;  // ps
  std::uint64_t seed = 1;
  std::size_t count = 1000;  // emitted pair events
  LossMode loss_mode = LossMode::post_selected;
  std::optional<BinnedDetectorSpec> binning;
  bool emit_mean_freq = false;

  void validate() const;
};

struct DropStats {
  std::size_t emitted = 0;
  std::size_t loss_dropped = 0;
  std::size_t range_dropped = 0;

  [[nodiscard]] std::size_t kept() const { return emitted - loss_dropped - range_dropped; }
};

/// Sub-stream seed for repeat `index`; repeats are independent and replayable.
[[nodiscard]] constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return seed + index;
}

/// Pull-style generator over one seeded stream.
class RecordStream {
 public:
  explicit RecordStream(SamplerConfig config);

  /// Next kept record, or nullopt once `count` events have been emitted.
  std::optional<DetectionRecord> next();

  [[nodiscard]] const DropStats& stats() const { return stats_; }
  [[nodiscard]] const SamplerConfig& config() const { return config_; }

 private:
  SamplerConfig config_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> d_omega_dist_;
  std::normal_distribution<double> mean_freq_dist_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  DropStats stats_;
  double keep_prob_ = 1.0;
  double visibility_ = 1.0;
};

struct RecordBatch {
  std::vector<DetectionRecord> records;
  DropStats stats;
};

RecordBatch draw_records(const SamplerConfig& config);

/// Rectangular grid over (omega1, omega2) for the joint spectral intensity.
struct JsiGridSpec {
  double omega1_min = 0.0;
  double omega1_max = 0.0;
  double omega2_min = 0.0;
  double omega2_max = 0.0;
  std::size_t bins1 = 64;
  std::size_t bins2 = 64;

  void validate() const;
  /// Square grid of `bins` cells per side centred on (center, center).
  static JsiGridSpec centred(double center, double half_width, std::size_t bins);
};

struct EmpiricalJsi {
  JsiGridSpec grid;
  std::vector<std::size_t> bunching;     // row-major [i1 * bins2 + i2]
  std::vector<std::size_t> coincidence;
  std::size_t out_of_range = 0;

  [[nodiscard]] std::size_t at(Outcome delta, std::size_t i1, std::size_t i2) const;
  [[nodiscard]] std::size_t total(Outcome delta) const;

  /// Sums cells along anti-diagonals (fixed i1 - i2), giving a dOmega histogram
  /// indexed by i1 - i2 + bins2 - 1. Requires equal cell widths on both axes.
  [[nodiscard]] std::vector<std::size_t> d_omega_marginal(Outcome delta) const;
};

/// Histogram of (omega1, omega2) split by outcome; throws ConfigError if any
/// record lacks a mean frequency.
EmpiricalJsi empirical_jsi(RecordSpan records, const JsiGridSpec& grid);

}  // namespace homdelay
