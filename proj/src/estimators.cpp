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

#include "homdelay/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "homdelay/errors.hpp"

namespace homdelay {

void DelayGrid::validate() const {
  std::ostringstream msg;
  if (!(t_min >= 0.0) || !(t_max > t_min))
    msg << "delay grid needs 0 <= t_min < t_max (got " << t_min << ", " << t_max << ")";
  else if (!(coarse_step > 0.0) || !(refine_step > 0.0))
    msg << "delay grid steps must be positive";
  else if (refine_step > coarse_step)
    msg << "refine step " << refine_step << " exceeds coarse step " << coarse_step;
  else if (!(refine_half_width >= 0.0))
    msg << "refine half width must be non-negative";
  if (!msg.str().empty()) throw ConfigError(msg.str());
}

void DelayGrid::validate_for(const BinnedDetectorSpec& spec) const {
  validate();
  if (t_max > max_unambiguous_delay(spec)) {
    std::ostringstream msg;
    msg << "delay grid t_max " << t_max << " ps exceeds the unambiguous range "
        << max_unambiguous_delay(spec) << " ps of the detector";
    throw ConfigError(msg.str());
  }
}

DelayGrid DelayGrid::defaults_for(const PhotonPairModel& model, double t_max) {
  DelayGrid g;
  g.t_max = t_max;
  g.coarse_step = model.tau() / 10.0;
  g.refine_step = 1e-4;
  g.refine_half_width = 2.0 * g.coarse_step;
  return g;
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::b_le_c: return "bLEc";
    case FailureReason::b_zero: return "bZero";
    case FailureReason::q_non_positive: return "qNonPositive";
    case FailureReason::log_arg_below_one: return "logArgBelowOne";
    case FailureReason::empty_sample: return "emptySample";
  }
  return "unknown";
}

OutcomeCounts count_outcomes(RecordSpan records) {
  OutcomeCounts c;
  for (const auto& r : records) {
    if (r.delta == Outcome::bunching)
      ++c.bunching;
    else
      ++c.coincidence;
  }
  return c;
}

EstimateResult estimate_nonresolved(std::size_t n_bunching, std::size_t n_coincidence,
                                    const PhotonPairModel& model) {
  const std::size_t total = n_bunching + n_coincidence;
  if (total == 0) return EstimateResult::failed(FailureReason::empty_sample);
  if (n_bunching == 0) return EstimateResult::failed(FailureReason::b_zero);
  if (n_bunching <= n_coincidence) return EstimateResult::failed(FailureReason::b_le_c);
  const double q = static_cast<double>(total) / static_cast<double>(n_bunching - n_coincidence);
  if (!(q > 0.0)) return EstimateResult::failed(FailureReason::q_non_positive);
  const double arg = model.eta * model.eta * q;
  if (!(arg >= 1.0)) return EstimateResult::failed(FailureReason::log_arg_below_one);
  return EstimateResult::success(std::sqrt(std::log(arg)) / model.sigma);
}

double loglik_resolved(RecordSpan records, const PhotonPairModel& model, double delta_t) {
  if (records.empty()) throw EmptySample("log-likelihood of an empty sample");
  double sum = 0.0;
  for (const auto& r : records) {
    const double p = conditional_outcome_prob(model, delta_t, r.d_omega, r.delta);
    sum += std::log(std::max(p, kProbabilityFloor));
  }
  return sum;
}

double loglik_joint_full(RecordSpan records, const PhotonPairModel& model, double delta_t) {
  if (records.empty()) throw EmptySample("log-likelihood of an empty sample");
  double sum = 0.0;
  for (const auto& r : records) {
    if (!r.mean_freq) throw ConfigError("joint likelihood requires records with a mean frequency");
    const double p = conditional_outcome_prob(model, delta_t, r.d_omega, r.delta);
    sum += std::log(mean_frequency_density(model, *r.mean_freq)) +
           std::log(joint_spectral_density(model, r.d_omega)) +
           std::log(std::max(p, kProbabilityFloor));
  }
  return sum;
}

void scan_loglik_resolved(RecordSpan records, const PhotonPairModel& model, double t0, double step,
                          std::span<double> out) {
  if (records.empty()) throw EmptySample("log-likelihood of an empty sample");
  const std::size_t k_count = out.size();
  if (k_count == 0) return;
  // Record-major sweep: cosines along the grid follow a rotation
  // recurrence (re-seeded exactly every kReseed points) and logs are taken
  // once per kBlock records on running products. Products of kBlock terms
  // >= kProbabilityFloor stay far above the double underflow threshold.
  constexpr std::size_t kBlock = 16;
  constexpr std::size_t kReseed = 64;
  std::vector<double> prod(k_count, 1.0);
  std::fill(out.begin(), out.end(), 0.0);
  const double e2 = model.eta * model.eta;
  std::size_t in_block = 0;
  auto flush = [&] {
    for (std::size_t k = 0; k < k_count; ++k) {
      out[k] += std::log(prod[k]);
      prod[k] = 1.0;
    }
    in_block = 0;
  };
  for (const auto& r : records) {
    const double a = 0.5 * e2 * sign(r.delta);
    const double w = r.d_omega;
    const double c1 = std::cos(w * step);
    const double s1 = std::sin(w * step);
    for (std::size_t k0 = 0; k0 < k_count; k0 += kReseed) {
      const std::size_t k_end = std::min(k_count, k0 + kReseed);
      const double t = t0 + static_cast<double>(k0) * step;
      double cur = std::cos(w * t);
      double sn = std::sin(w * t);
      for (std::size_t k = k0; k < k_end; ++k) {
        const double p = 0.5 + a * cur;
        prod[k] *= p > kProbabilityFloor ? p : kProbabilityFloor;
        const double next = cur * c1 - sn * s1;
        sn = sn * c1 + cur * s1;
        cur = next;
      }
    }
    if (++in_block == kBlock) flush();
  }
  if (in_block > 0) flush();
}

namespace {

struct LevelResult {
  double best_t = 0.0;
  double best_value = 0.0;
  std::size_t best_index = 0;
};

// Evaluates the objective on center + j step, with the points clipped to
// [lo, hi], and returns the first maximum.
LevelResult scan_level(const GridObjective& objective, double center, double step, double lo,
                       double hi) {
  const double below = std::floor((center - lo) / step + 1e-9);
  const double above = std::floor((hi - center) / step + 1e-9);
  const double start = center - below * step;
  const auto count = static_cast<std::size_t>(below + above) + 1;
  std::vector<double> values(count);
  objective(start, step, values);
  LevelResult r;
  r.best_value = values[0];
  for (std::size_t k = 1; k < count; ++k) {
    if (values[k] > r.best_value) {
      r.best_value = values[k];
      r.best_index = k;
    }
  }
  r.best_t = start + static_cast<double>(r.best_index) * step;
  return r;
}

}  // namespace

EstimateResult maximize_on_grid(const DelayGrid& grid, const GridObjective& objective) {
  grid.validate();
  EstimateResult result;
  const LevelResult coarse = scan_level(objective, grid.t_min, grid.coarse_step, grid.t_min, grid.t_max);
  result.grid.coarse_points =
      static_cast<std::size_t>(std::floor((grid.t_max - grid.t_min) / grid.coarse_step + 1e-9)) + 1;
  result.grid.coarse_argmax = coarse.best_index;
  LevelResult best = coarse;

  if (grid.refine_step < grid.coarse_step && grid.refine_half_width > 0.0) {
    if (grid.exhaustive_refine) {
      best = scan_level(objective, coarse.best_t, grid.refine_step,
                        std::max(grid.t_min, coarse.best_t - grid.refine_half_width),
                        std::min(grid.t_max, coarse.best_t + grid.refine_half_width));
      result.grid.refine_levels = 1;
    } else {
      // Zoom by decades: each level scans +-2 steps of the previous level.
      double step = grid.coarse_step;
      double half_width = grid.refine_half_width;
      while (step > grid.refine_step) {
        const double next = std::max(step / 10.0, grid.refine_step);
        best = scan_level(objective, best.best_t, next, std::max(grid.t_min, best.best_t - half_width),
                          std::min(grid.t_max, best.best_t + half_width));
        ++result.grid.refine_levels;
        half_width = std::min(grid.refine_half_width, 2.0 * next);
        step = next;
      }
    }
    result.grid.refine_argmax = best.best_index;
  }
  result.value = best.best_t;
  result.loglik_at_max = best.best_value;
  return result;
}

EstimateResult estimate_resolved(RecordSpan records, const PhotonPairModel& model,
                                 const DelayGrid& grid) {
  if (records.empty()) throw EmptySample("resolved estimate of an empty sample");
  return maximize_on_grid(grid, [&](double t0, double step, std::span<double> out) {
    scan_loglik_resolved(records, model, t0, step, out);
  });
}

BinnedLikelihood::BinnedLikelihood(const PhotonPairModel& model, const BinnedDetectorSpec& spec)
    : model_(model), spec_(spec) {
  model_.validate();
  validate_coverage(spec_, model_);
  mass_.resize(static_cast<std::size_t>(spec_.n_max) + 1);
  for (std::uint32_t n = 0; n <= spec_.n_max; ++n) mass_[n] = bin_mass(model_, spec_, n);
}

std::shared_ptr<const std::vector<double>> BinnedLikelihood::beat_terms(double delta_t) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = beat_cache_.find(delta_t); it != beat_cache_.end()) return it->second;
  }
  auto terms = std::make_shared<std::vector<double>>(mass_.size());
  for (std::uint32_t n = 0; n <= spec_.n_max; ++n)
    (*terms)[n] = bin_beat_term(model_, spec_, delta_t, n);
  std::lock_guard lock(mutex_);
  if (beat_cache_.size() >= kMaxCachedDelays) beat_cache_.clear();
  beat_cache_.emplace(delta_t, terms);
  return terms;
}

double BinnedLikelihood::probability(std::uint32_t n, Outcome delta, double delta_t) const {
  if (n > spec_.n_max) throw ConfigError("bin index exceeds n_max");
  const double e2 = model_.eta * model_.eta;
  const double beat = (*beat_terms(delta_t))[n];
  const double p = delta == Outcome::bunching ? (1.0 + e2) * mass_[n] - 2.0 * e2 * beat
                                              : (1.0 - e2) * mass_[n] + 2.0 * e2 * beat;
  return std::max(p, kProbabilityFloor);
}

void BinnedLikelihood::scan(std::span<const std::size_t> counts, double t0, double step,
                            std::span<double> out) const {
  if (counts.size() != 2 * mass_.size()) throw ConfigError("bin count table has the wrong size");
  const double e2 = model_.eta * model_.eta;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto terms = beat_terms(t0 + static_cast<double>(k) * step);
    double sum = 0.0;
    for (std::size_t n = 0; n < mass_.size(); ++n) {
      const std::size_t cb = counts[2 * n];
      const std::size_t cc = counts[2 * n + 1];
      if (cb == 0 && cc == 0) continue;
      const double beat = (*terms)[n];
      if (cb > 0) {
        const double p = (1.0 + e2) * mass_[n] - 2.0 * e2 * beat;
        sum += static_cast<double>(cb) * std::log(std::max(p, kProbabilityFloor));
      }
      if (cc > 0) {
        const double p = (1.0 - e2) * mass_[n] + 2.0 * e2 * beat;
        sum += static_cast<double>(cc) * std::log(std::max(p, kProbabilityFloor));
      }
    }
    out[k] = sum;
  }
}

std::vector<std::size_t> bin_counts(RecordSpan records, const BinnedDetectorSpec& spec) {
  std::vector<std::size_t> counts(2 * (static_cast<std::size_t>(spec.n_max) + 1), 0);
  for (const auto& r : records) {
    if (!r.bin_index) throw ConfigError("binned estimate requires records with a bin index");
    if (*r.bin_index > spec.n_max)
      throw ConfigError("record bin index " + std::to_string(*r.bin_index) + " exceeds n_max " +
                        std::to_string(spec.n_max));
    ++counts[2 * static_cast<std::size_t>(*r.bin_index) + (r.delta == Outcome::coincidence ? 1 : 0)];
  }
  return counts;
}

EstimateResult estimate_resolved_binned(RecordSpan records, const BinnedLikelihood& likelihood,
                                        const DelayGrid& grid) {
  if (records.empty()) throw EmptySample("binned estimate of an empty sample");
  grid.validate_for(likelihood.spec());
  const auto counts = bin_counts(records, likelihood.spec());
  return maximize_on_grid(grid, [&](double t0, double step, std::span<double> out) {
    likelihood.scan(counts, t0, step, out);
  });
}

EstimateResult estimate_resolved_binned(RecordSpan records, const PhotonPairModel& model,
                                        const BinnedDetectorSpec& spec, const DelayGrid& grid) {
  const BinnedLikelihood likelihood(model, spec);
  return estimate_resolved_binned(records, likelihood, grid);
}

}  // namespace homdelay
