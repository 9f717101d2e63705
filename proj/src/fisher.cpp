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

#include "homdelay/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "homdelay/errors.hpp"
#include "homdelay/quadrature.hpp"

namespace homdelay {

namespace {

constexpr double kDenominatorFloor = 1e-12;

double loss_factor(const PhotonPairModel& model, const FisherOptions& opts) {
  return opts.physical_loss ? model.gamma * model.gamma : 1.0;
}

}  // namespace

std::string_view to_string(FisherMethod method) {
  switch (method) {
    case FisherMethod::non_resolved: return "nonresolved";
    case FisherMethod::resolved_ideal: return "resolved_ideal";
    case FisherMethod::resolved_binned: return "resolved_binned";
  }
  return "unknown";
}

FisherMethod fisher_method_from_string(std::string_view name) {
  if (name == "nr" || name == "nonresolved" || name == "non_resolved") return FisherMethod::non_resolved;
  if (name == "ideal" || name == "fr" || name == "resolved_ideal") return FisherMethod::resolved_ideal;
  if (name == "binned" || name == "frbinned" || name == "resolved_binned")
    return FisherMethod::resolved_binned;
  throw ConfigError("unknown Fisher method '" + std::string(name) + "'");
}

double qfi(const PhotonPairModel& model) { return 2.0 * model.sigma * model.sigma; }

double fisher_nonresolved(const PhotonPairModel& model, double delta_t) {
  const double e4 = std::pow(model.eta, 4);
  if (e4 == 0.0) return 0.0;
  const double u = 2.0 * model.sigma * model.sigma * delta_t * delta_t;
  if (u == 0.0) return e4 == 1.0 ? qfi(model) : 0.0;
  // exp(u) - eta^4 = expm1(u) + (1 - eta^4) keeps the eta = 1 small-u limit.
  const double denom = std::expm1(u) + (1.0 - e4);
  return e4 * model.sigma * model.sigma * 2.0 * u / denom;
}

double fisher_resolved_ideal(const PhotonPairModel& model, double delta_t,
                             const FisherOptions& opts) {
  model.validate();
  const double e4 = std::pow(model.eta, 4);
  if (e4 == 0.0) return 0.0;
  const double t = std::abs(delta_t);
  const double limit = 8.0 * std::sqrt(2.0) * model.sigma;

  QuadratureOptions quad;
  quad.rel_tol = opts.quad_tol;
  quad.max_panel_width = std::sqrt(2.0) * model.sigma / 2.0;
  if (t > 0.0) quad.max_panel_width = std::min(quad.max_panel_width, kPi / (4.0 * t));

  const bool removable_limit = (t == 0.0 && e4 == 1.0);
  auto integrand = [&](double w) {
    const double c = joint_spectral_density(model, w) * w * w;
    if (removable_limit) return c;
    const double s = std::sin(w * t);
    const double s2 = s * s;
    // 1 - eta^4 cos^2 = (1 - eta^4) + eta^4 sin^2
    const double denom = std::max((1.0 - e4) + e4 * s2, kDenominatorFloor);
    return c * s2 / denom;
  };
  // Even integrand: integrate the positive half of [-limit, limit].
  const double half = integrate(integrand, 0.0, limit, quad).value;
  const double value = removable_limit ? 2.0 * half : e4 * 2.0 * half;
  return loss_factor(model, opts) * value;
}

BinnedFisher fisher_resolved_binned(const PhotonPairModel& model, const BinnedDetectorSpec& spec,
                                    double delta_t, const FisherOptions& opts) {
  model.validate();
  validate_coverage(spec, model);
  BinnedFisher out;
  out.per_bin.assign(static_cast<std::size_t>(spec.n_max) + 1, 0.0);
  const double e4 = std::pow(model.eta, 4);
  if (e4 == 0.0) return out;

  QuadratureOptions quad = kBinQuadrature;
  quad.rel_tol = std::min(kBinQuadrature.rel_tol, opts.quad_tol);
  const double scale = loss_factor(model, opts);
  for (std::uint32_t n = 0; n <= spec.n_max; ++n) {
    const BinProbabilities b = bin_probabilities(model, spec, delta_t, n, quad);
    if (b.bunching <= 0.0 || b.coincidence <= 0.0) continue;
    // (dP/d dt)^2 = eta^4 S_n^2 for both outcomes.
    const double f = e4 * b.slope * b.slope * (1.0 / b.bunching + 1.0 / b.coincidence);
    out.per_bin[n] = scale * f;
    out.total += scale * f;
  }
  return out;
}

CrbReport crb(double fisher_per_sample, double sample_count) {
  if (!(fisher_per_sample > 0.0))
    throw DomainError("Cramer-Rao bound needs positive Fisher information, got " +
                      std::to_string(fisher_per_sample));
  if (!(sample_count >= 1.0)) throw DomainError("Cramer-Rao bound needs at least one sample");
  CrbReport r;
  r.fisher_per_sample = fisher_per_sample;
  r.sample_count = sample_count;
  r.bound = 1.0 / (sample_count * fisher_per_sample);
  r.bound_std = std::sqrt(r.bound);
  return r;
}

FisherCurve fisher_curve(FisherMethod method, const PhotonPairModel& model,
                         std::span<const double> delays, const EtaOfDelay& eta_of,
                         const std::optional<BinnedDetectorSpec>& spec, const FisherOptions& opts) {
  FisherCurve curve;
  curve.method = method;
  curve.quad_tol = method == FisherMethod::non_resolved ? 0.0 : opts.quad_tol;
  if (method == FisherMethod::resolved_binned) {
    if (!spec) throw ConfigError("binned Fisher curve requires a detector spec");
    curve.epsilon = spec->epsilon;
  }
  curve.points.reserve(delays.size());
  for (double t : delays) {
    const PhotonPairModel m = eta_of ? model.with_eta(eta_of(t)) : model;
    m.validate();
    FisherPoint p{t, 0.0, m.eta};
    switch (method) {
      case FisherMethod::non_resolved: p.fisher = fisher_nonresolved(m, t); break;
      case FisherMethod::resolved_ideal: p.fisher = fisher_resolved_ideal(m, t, opts); break;
      case FisherMethod::resolved_binned: p.fisher = fisher_resolved_binned(m, *spec, t, opts).total; break;
    }
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace homdelay
