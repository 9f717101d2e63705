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

#include "homdelay/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "homdelay/errors.hpp"
#include "homdelay/fisher.hpp"
#include "homdelay/parallel.hpp"
#include "homdelay/sampler.hpp"

namespace homdelay {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::nr: return "NR";
    case EstimatorKind::fr: return "FR";
    case EstimatorKind::fr_binned: return "FRbinned";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "nr") return EstimatorKind::nr;
  if (lower == "fr") return EstimatorKind::fr;
  if (lower == "frbinned" || lower == "fr_binned") return EstimatorKind::fr_binned;
  throw ConfigError("unknown estimator '" + std::string(name) + "' (expected NR, FR or FRbinned)");
}

EtaTable::EtaTable(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw ConfigError("eta table needs at least one knot");
  std::sort(knots_.begin(), knots_.end());
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const auto [t, eta] = knots_[i];
    if (!std::isfinite(t) || !(eta >= 0.0 && eta <= 1.0))
      throw ConfigError("eta table knots need finite delays and eta in [0, 1]");
    if (i > 0 && knots_[i - 1].first == t) throw ConfigError("eta table has duplicate delays");
  }
}

bool EtaTable::covers(double delta_t) const {
  return !knots_.empty() && delta_t >= knots_.front().first && delta_t <= knots_.back().first;
}

double EtaTable::operator()(double delta_t) const {
  if (!covers(delta_t)) {
    std::ostringstream msg;
    msg << "delay " << delta_t << " ps is outside the eta table range";
    if (!knots_.empty()) msg << " [" << knots_.front().first << ", " << knots_.back().first << "]";
    throw ConfigError(msg.str());
  }
  auto hi = std::lower_bound(knots_.begin(), knots_.end(), delta_t,
                             [](const auto& knot, double t) { return knot.first < t; });
  if (hi->first == delta_t) return hi->second;
  auto lo = hi - 1;
  const double w = (delta_t - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

void SweepConfig::validate() const {
  model.validate();
  if (delays.empty()) throw ConfigError("sweep needs at least one delay");
  if (!std::is_sorted(delays.begin(), delays.end()))
    throw ConfigError("sweep delays must be sorted ascending");
  if (repeats < 1) throw ConfigError("sweep repeats must be at least 1");
  if (samples < 1) throw ConfigError("sweep samples per repeat must be at least 1");
  if (estimators.empty()) throw ConfigError("sweep needs at least one estimator");
  for (double t : delays) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("sweep delays must be finite and >= 0");
    if (eta_table) (void)(*eta_table)(t);
  }
  const bool binned = std::find(estimators.begin(), estimators.end(), EstimatorKind::fr_binned) !=
                      estimators.end();
  if (binned) {
    if (!detector) throw ConfigError("FRbinned estimator requires a detector spec");
    validate_coverage(*detector, model);
    grid().validate_for(*detector);
  } else {
    grid().validate();
  }
}

double SweepConfig::eta_at(double delta_t) const {
  return eta_table ? (*eta_table)(delta_t) : model.eta;
}

DelayGrid SweepConfig::grid() const {
  const double hi = delays.empty() ? 20.0 : std::max(20.0, 2.0 * delays.back());
  return DelayGrid::defaults_for(model, t_max.value_or(hi));
}

std::uint64_t SweepConfig::repeat_seed(std::size_t delay_index, std::size_t repeat) const {
  return derive_stream_seed(seed, static_cast<std::uint64_t>(delay_index) * repeats + repeat);
}

const EstimatorStats* DelayReport::find(EstimatorKind kind) const {
  for (const auto& s : estimators)
    if (s.estimator == kind) return &s;
  return nullptr;
}

EstimatorStats summarize_estimates(EstimatorKind kind, std::span<const EstimateResult> results,
                                   double true_delay, std::size_t samples) {
  EstimatorStats s;
  s.estimator = kind;
  double sum = 0.0;
  for (const auto& r : results) {
    if (r.ok()) {
      ++s.successes;
      sum += *r.value;
    } else {
      ++s.failures;
      ++s.failure_reasons[r.failure.value_or(FailureReason::empty_sample)];
    }
  }
  if (!results.empty())
    s.failure_fraction = static_cast<double>(s.failures) / static_cast<double>(results.size());
  if (s.successes == 0) return s;

  const double n = static_cast<double>(s.successes);
  const double mean = sum / n;
  double ss = 0.0;
  double sq_err = 0.0;
  for (const auto& r : results) {
    if (!r.ok()) continue;
    ss += (*r.value - mean) * (*r.value - mean);
    sq_err += (*r.value - true_delay) * (*r.value - true_delay);
  }
  const double var = ss / n;
  s.mean = mean;
  s.stddev = std::sqrt(var);
  s.standard_error = std::sqrt(var / n);
  s.bias = mean - true_delay;
  s.mse = sq_err / n;
  if (s.failure_fraction < 0.5 && var > 0.0)
    s.fisher_exp = 1.0 / (static_cast<double>(samples) * var);
  return s;
}

namespace {

bool wants(const SweepConfig& config, EstimatorKind kind) {
  return std::find(config.estimators.begin(), config.estimators.end(), kind) !=
         config.estimators.end();
}

double theoretical_fisher(EstimatorKind kind, const PhotonPairModel& model,
                          const std::optional<BinnedDetectorSpec>& spec, double delta_t) {
  switch (kind) {
    case EstimatorKind::nr: return fisher_nonresolved(model, delta_t);
    case EstimatorKind::fr: return fisher_resolved_ideal(model, delta_t);
    case EstimatorKind::fr_binned: return fisher_resolved_binned(model, *spec, delta_t).total;
  }
  return 0.0;
}

DelayReport run_delay(const SweepConfig& config, const DelayGrid& grid, std::size_t index) {
  const double t = config.delays[index];
  DelayReport out;
  out.delta_t = t;
  out.eta = config.eta_at(t);
  const PhotonPairModel model = config.model.with_eta(out.eta);
  const bool binned = wants(config, EstimatorKind::fr_binned);

  std::optional<BinnedLikelihood> likelihood;
  if (binned) likelihood.emplace(model, *config.detector);

  const std::size_t r = config.repeats;
  std::vector<std::vector<EstimateResult>> results(config.estimators.size(),
                                                   std::vector<EstimateResult>(r));
  parallel_for(r, [&](std::size_t i) {
    SamplerConfig sc;
    sc.model = model;
    sc.true_delay = t;
    sc.seed = config.repeat_seed(index, i);
    sc.count = config.samples;
    if (binned) sc.binning = config.detector;
    const RecordBatch batch = draw_records(sc);
    for (std::size_t k = 0; k < config.estimators.size(); ++k) {
      switch (config.estimators[k]) {
        case EstimatorKind::nr: {
          const OutcomeCounts c = count_outcomes(batch.records);
          results[k][i] = estimate_nonresolved(c.bunching, c.coincidence, model);
          break;
        }
        case EstimatorKind::fr:
          results[k][i] = estimate_resolved(batch.records, model, grid);
          break;
        case EstimatorKind::fr_binned:
          results[k][i] = estimate_resolved_binned(batch.records, *likelihood, grid);
          break;
      }
    }
  });

  for (std::size_t k = 0; k < config.estimators.size(); ++k) {
    const EstimatorKind kind = config.estimators[k];
    EstimatorStats s = summarize_estimates(kind, results[k], t, config.samples);
    s.fisher = theoretical_fisher(kind, model, config.detector, t);
    if (s.fisher > 0.0) s.crb = crb(s.fisher, static_cast<double>(config.samples)).bound;
    out.estimators.push_back(std::move(s));
  }
  const EstimatorStats* nr = out.find(EstimatorKind::nr);
  const EstimatorStats* fr = out.find(EstimatorKind::fr);
  if (nr && fr && nr->mse && fr->mse && *fr->mse > 0.0) out.mse_ratio = *nr->mse / *fr->mse;
  return out;
}

std::string delay_context(double t) {
  std::ostringstream msg;
  msg << "sweep failed at delay " << t << " ps: ";
  return msg.str();
}

}  // namespace

SweepReport run_sweep(const SweepConfig& config) {
  config.validate();
  SweepReport report;
  report.config = config;
  const DelayGrid grid = config.grid();
  if (wants(config, EstimatorKind::fr_binned) && grid.t_max > 0.1 / config.detector->epsilon) {
    std::ostringstream msg;
    msg << "grid t_max " << grid.t_max << " ps exceeds 0.1/epsilon = "
        << 0.1 / config.detector->epsilon << " ps; binned fringes are strongly washed out there";
    report.warnings.push_back(msg.str());
  }
  for (std::size_t d = 0; d < config.delays.size(); ++d) {
    try {
      report.points.push_back(run_delay(config, grid, d));
    } catch (const ConfigError& e) {
      throw ConfigError(delay_context(config.delays[d]) + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(delay_context(config.delays[d]) + e.what());
    }
  }
  return report;
}

void MicroShiftConfig::validate() const {
  model.validate();
  if (!(base >= 0.0) || !std::isfinite(base)) throw ConfigError("micro-shift base must be >= 0");
  if (!(shift >= 0.0) || !std::isfinite(shift)) throw ConfigError("micro-shift shift must be >= 0");
  if (samples < 1) throw ConfigError("micro-shift needs at least one sample");
  if (grid) grid->validate();
  for (auto n : trace_points)
    if (n < 1 || n > samples) throw ConfigError("trace points must lie in [1, samples]");
}

MicroShiftReport micro_shift_experiment(const MicroShiftConfig& config) {
  config.validate();
  const DelayGrid grid =
      config.grid.value_or(DelayGrid::defaults_for(config.model, std::max(2.0 * config.base, 1.0)));
  grid.validate();

  std::vector<std::size_t> points = config.trace_points;
  if (points.empty())
    for (std::size_t n = 1000; n < config.samples; n *= 10) points.push_back(n);
  points.push_back(config.samples);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  auto run_set = [&](double delay, std::uint64_t seed) {
    SamplerConfig sc;
    sc.model = config.model;
    sc.true_delay = delay;
    sc.seed = seed;
    sc.count = config.samples;
    const RecordBatch batch = draw_records(sc);
    std::vector<double> trace;
    trace.reserve(points.size());
    for (std::size_t n : points) {
      const RecordSpan prefix(batch.records.data(), n);
      trace.push_back(*estimate_resolved(prefix, config.model, grid).value);
    }
    return trace;
  };
  const std::vector<double> base_trace = run_set(config.base, config.seed);
  const std::vector<double> shifted_trace =
      run_set(config.base + config.shift, derive_stream_seed(config.seed, 1));

  MicroShiftReport out;
  for (std::size_t i = 0; i < points.size(); ++i)
    out.trace.push_back({points[i], base_trace[i], shifted_trace[i]});
  out.base_estimate = base_trace.back();
  out.shifted_estimate = shifted_trace.back();
  out.shift_estimate = out.shifted_estimate - out.base_estimate;
  out.fisher = fisher_resolved_ideal(config.model, config.base);
  out.estimate_std = crb(out.fisher, static_cast<double>(config.samples)).bound_std;
  out.combined_std = std::sqrt(2.0) * out.estimate_std;
  out.insufficient_samples = config.shift < 3.0 * out.combined_std;
  return out;
}

std::vector<AllanPoint> allan_variance(std::span<const double> series,
                                       std::span<const std::size_t> cluster_sizes) {
  std::vector<AllanPoint> out;
  out.reserve(cluster_sizes.size());
  for (std::size_t m : cluster_sizes) {
    if (m == 0) throw ConfigError("Allan cluster size must be at least 1");
    const std::size_t clusters = series.size() / m;
    if (clusters < 2) {
      std::ostringstream msg;
      msg << "Allan variance at cluster size " << m << " needs at least " << 2 * m
          << " samples, got " << series.size();
      throw InsufficientData(msg.str());
    }
    double prev = 0.0;
    double sum_sq = 0.0;
    for (std::size_t j = 0; j < clusters; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += series[j * m + k];
      const double mean = acc / static_cast<double>(m);
      if (j > 0) sum_sq += (mean - prev) * (mean - prev);
      prev = mean;
    }
    out.push_back({m, clusters, sum_sq / (2.0 * static_cast<double>(clusters - 1))});
  }
  return out;
}

std::vector<double> outcome_series(RecordSpan records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(static_cast<double>(sign(r.delta)));
  return out;
}

}  // namespace homdelay
