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

#include "homdelay/sampler.hpp"

#include <cmath>
#include <string>

#include "homdelay/errors.hpp"

namespace homdelay {

void SamplerConfig::validate() const {
  model.validate();
  if (count < 1) throw ConfigError("sample count must be at least 1");
  if (!std::isfinite(true_delay)) throw ConfigError("true delay must be finite");
  if (binning) validate_coverage(*binning, model);
}

RecordStream::RecordStream(SamplerConfig config)
    : config_(std::move(config)),
      engine_(config_.seed),
      d_omega_dist_(0.0, std::sqrt(2.0) * config_.model.sigma),
      mean_freq_dist_(config_.model.omega0, config_.model.sigma / std::sqrt(2.0)) {
  config_.validate();
  if (config_.loss_mode == LossMode::physical)
    keep_prob_ = config_.model.gamma * config_.model.gamma;
  visibility_ = config_.model.eta * config_.model.eta;
}

std::optional<DetectionRecord> RecordStream::next() {
  while (stats_.emitted < config_.count) {
    ++stats_.emitted;
    DetectionRecord rec;
    rec.d_omega = d_omega_dist_(engine_);
    const double p_bunch = 0.5 * (1.0 + visibility_ * std::cos(rec.d_omega * config_.true_delay));
    rec.delta = unit_(engine_) < p_bunch ? Outcome::bunching : Outcome::coincidence;
    if (config_.emit_mean_freq) rec.mean_freq = mean_freq_dist_(engine_);
    if (config_.loss_mode == LossMode::physical && !(unit_(engine_) < keep_prob_)) {
      ++stats_.loss_dropped;
      continue;
    }
    if (config_.binning) {
      rec.bin_index = try_assign_bin(*config_.binning, rec.d_omega, unit_(engine_));
      if (!rec.bin_index) {
        ++stats_.range_dropped;
        continue;
      }
    }
    return rec;
  }
  return std::nullopt;
}

RecordBatch draw_records(const SamplerConfig& config) {
  RecordStream stream(config);
  RecordBatch batch;
  batch.records.reserve(config.count);
  while (auto rec = stream.next()) batch.records.push_back(*rec);
  batch.records.shrink_to_fit();
  batch.stats = stream.stats();
  return batch;
}

void JsiGridSpec::validate() const {
  if (!(omega1_max > omega1_min) || !(omega2_max > omega2_min))
    throw ConfigError("JSI grid ranges must be non-empty");
  if (bins1 == 0 || bins2 == 0) throw ConfigError("JSI grid needs at least one bin per axis");
}

JsiGridSpec JsiGridSpec::centred(double center, double half_width, std::size_t bins) {
  return {center - half_width, center + half_width, center - half_width, center + half_width,
          bins, bins};
}

std::size_t EmpiricalJsi::at(Outcome delta, std::size_t i1, std::size_t i2) const {
  const auto& cells = delta == Outcome::bunching ? bunching : coincidence;
  return cells.at(i1 * grid.bins2 + i2);
}

std::size_t EmpiricalJsi::total(Outcome delta) const {
  const auto& cells = delta == Outcome::bunching ? bunching : coincidence;
  std::size_t sum = 0;
  for (auto c : cells) sum += c;
  return sum;
}

std::vector<std::size_t> EmpiricalJsi::d_omega_marginal(Outcome delta) const {
  const double h1 = (grid.omega1_max - grid.omega1_min) / static_cast<double>(grid.bins1);
  const double h2 = (grid.omega2_max - grid.omega2_min) / static_cast<double>(grid.bins2);
  if (std::abs(h1 - h2) > 1e-12 * std::max(h1, h2))
    throw ConfigError("anti-diagonal marginal needs equal cell widths");
  std::vector<std::size_t> out(grid.bins1 + grid.bins2 - 1, 0);
  for (std::size_t i1 = 0; i1 < grid.bins1; ++i1)
    for (std::size_t i2 = 0; i2 < grid.bins2; ++i2)
      out[i1 + grid.bins2 - 1 - i2] += at(delta, i1, i2);
  return out;
}

EmpiricalJsi empirical_jsi(RecordSpan records, const JsiGridSpec& grid) {
  grid.validate();
  EmpiricalJsi jsi;
  jsi.grid = grid;
  jsi.bunching.assign(grid.bins1 * grid.bins2, 0);
  jsi.coincidence.assign(grid.bins1 * grid.bins2, 0);
  const double h1 = (grid.omega1_max - grid.omega1_min) / static_cast<double>(grid.bins1);
  const double h2 = (grid.omega2_max - grid.omega2_min) / static_cast<double>(grid.bins2);
  for (const auto& rec : records) {
    if (!rec.mean_freq) throw ConfigError("JSI requires records with a mean frequency");
    const double w1 = *rec.omega1();
    const double w2 = *rec.omega2();
    const double f1 = std::floor((w1 - grid.omega1_min) / h1);
    const double f2 = std::floor((w2 - grid.omega2_min) / h2);
    if (f1 < 0.0 || f2 < 0.0 || f1 >= static_cast<double>(grid.bins1) ||
        f2 >= static_cast<double>(grid.bins2)) {
      ++jsi.out_of_range;
      continue;
    }
    auto& cells = rec.delta == Outcome::bunching ? jsi.bunching : jsi.coincidence;
    ++cells[static_cast<std::size_t>(f1) * grid.bins2 + static_cast<std::size_t>(f2)];
  }
  return jsi;
}

}  // namespace homdelay
