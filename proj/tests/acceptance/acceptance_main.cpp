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

// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: homdelay_acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "homdelay/cli.hpp"
#include "homdelay/fisher.hpp"
#include "homdelay/harness.hpp"
#include "homdelay/model.hpp"
#include "homdelay/sampler.hpp"
#include "homdelay/units.hpp"
#include "../support/oracles.hpp"

using namespace homdelay;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PhotonPairModel model_tau(double tau, double eta) {
  return PhotonPairModel::from_tau(tau, eta, 1.0, units::thz_to_radps(193.0));
}

double round_sig(double x, int digits) {
  const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(x))));
  return std::round(x * scale) / scale;
}

Verdict qfi_constant() {
  std::ostringstream out, err;
  const int code = cli_main({"fisher", "qfi", "--sigma-ghz", "81"}, out, err);
  if (code != 0) return {false, "cli exit " + std::to_string(code) + ": " + err.str()};
  const std::string text = out.str();
  const double v = std::stod(text.substr(text.find('\n') + 1));
  const double at_tau = qfi(model_tau(0.98, 1.0));
  const bool pass = round_sig(v, 2) == 0.52 && std::abs(at_tau - 0.5206) < 5e-5;
  return {pass, fmt("81 GHz -> %.6f ps^-2 (2 s.f. %.2f); tau = 0.98 ps -> %.6f", v, round_sig(v, 2), at_tau)};
}

Verdict nr_peak() {
  const auto m = model_tau(0.98, 0.98);
  std::vector<double> delays;
  for (int k = 0; k <= 6000; ++k) delays.push_back(0.001 * k);
  const auto curve = fisher_curve(FisherMethod::non_resolved, m, delays);
  std::size_t best = 0;
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    if (curve.points[i].fisher > curve.points[best].fisher) best = i;
  const double peak = curve.points[best].fisher;
  const double t_peak = curve.points[best].delta_t;
  double rise = 0.0, fall = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const double a = curve.points[i - 1].fisher - peak / 2, b = curve.points[i].fisher - peak / 2;
    const double t = curve.points[i - 1].delta_t + 0.001 * a / (a - b);
    if (a < 0 && b >= 0) rise = t;
    if (a >= 0 && b < 0) fall = t;
  }
  const double two_tau = 2.0 * m.tau();
  const bool pass = std::abs(t_peak - 0.820) <= 0.0015 && std::abs(peak - 0.3384) < 5e-5 &&
                    std::abs(peak / 0.336 - 1.0) < 0.01 && std::abs(fall / two_tau - 1.0) < 0.15;
  return {pass, fmt("peak %.5f at %.3f ps (vs 0.336: %+.2f%%); falls to half height at %.3f ps = %.3f x 2tau "
                    "(two-sided FWHM %.3f ps)",
                    peak, t_peak, 100 * (peak / 0.336 - 1), fall, fall / two_tau, fall - rise)};
}

Verdict quantum_limit() {
  const auto m = model_tau(0.98, 1.0);
  double worst = 0.0;
  for (double t : {0.1, 1.0, 5.0, 20.0, 60.0})
    worst = std::max(worst, std::abs(fisher_resolved_ideal(m, t) / qfi(m) - 1.0));
  return {worst < 1e-6, fmt("max relative deviation from QFI %.2e", worst)};
}

Verdict finite_resolution() {
  const auto one = model_tau(0.98, 1.0);
  std::vector<double> f;
  for (double eps : {8e-3, 4e-3, 2e-3, 1e-3})
    f.push_back(fisher_resolved_binned(one, BinnedDetectorSpec::for_model(one, eps), 10.0).total);
  bool monotone = true;
  for (std::size_t i = 1; i < f.size(); ++i) monotone = monotone && f[i] > f[i - 1] && f[i] <= qfi(one);
  const double gap = 1.0 - f.back() / qfi(one);

  // F vanishes at dt = 0 for eta < 1, so the comparison starts where the
  // binned curve first clears the NR peak.
  const auto m = model_tau(0.98, 0.98);
  const auto spec = BinnedDetectorSpec::for_model(m, 0.0069);
  const double nr_peak = 0.3384;
  double min_f = 1e300, min_t = 0.0, crossing = -1.0;
  for (int k = 1; k <= 100; ++k) {
    const double t = 0.1 * k;
    const double v = fisher_resolved_binned(m, spec, t).total;
    if (crossing < 0 && v > nr_peak) crossing = t;
    if (t >= 0.5 && v < min_f) {
      min_f = v;
      min_t = t;
    }
  }
  const bool pass = monotone && gap < 0.02 && min_f > nr_peak;
  return {pass, fmt("eps sweep %.5f %.5f %.5f %.5f (gap %.2f%%); eps=0.0069: first above NR peak at %.1f ps, "
                    "min over [0.5, 10] ps %.4f at %.1f ps",
                    f[0], f[1], f[2], f[3], 100 * gap, crossing, min_f, min_t)};
}

Verdict efficiency() {
  SweepConfig c;
  c.model = model_tau(0.98, 0.98);
  c.delays = {2.0};
  c.repeats = 500;
  c.samples = 1000;
  c.estimators = {EstimatorKind::fr};
  const auto s = run_sweep(c).points[0].estimators[0];
  const double var = *s.stddev * *s.stddev;
  const bool pass = var >= *s.crb && var <= 1.5 * *s.crb && std::abs(*s.bias) < 3.0 * *s.standard_error;
  return {pass, fmt("var/CRB %.4f, bias %.5f ps = %.2f SE", var / *s.crb, *s.bias, *s.bias / *s.standard_error)};
}

SweepReport nr_sweep() {
  SweepConfig c;
  c.model = model_tau(0.98, 0.98);
  c.delays = {4.0, 5.0, 10.0, 20.0, 30.0};
  c.estimators = {EstimatorKind::nr};
  return run_sweep(c);
}

SweepReport fr_sweep() {
  SweepConfig c;
  c.model = model_tau(0.98, 0.98);
  c.delays = {5.0, 10.0, 20.0, 30.0};
  c.eta_table = EtaTable({{5.0, 0.95}, {10.0, 0.90}, {20.0, 0.85}, {30.0, 0.78}});
  c.estimators = {EstimatorKind::fr};
  return run_sweep(c);
}

Verdict dynamic_range() {
  const auto nr = nr_sweep();
  const auto fr = fr_sweep();
  bool pass = true;
  std::string detail = "NR failure fraction";
  for (const auto& p : nr.points) {
    const double ff = p.estimators[0].failure_fraction;
    pass = pass && ff > 0.5;
    detail += fmt(" %g ps: %.2f", p.delta_t, ff);
  }
  detail += "; FR |bias|/dt";
  for (const auto& p : fr.points) {
    const double rel = std::abs(*p.estimators[0].bias) / p.delta_t;
    pass = pass && rel < 0.05;
    detail += fmt(" %g ps: %.4f", p.delta_t, rel);
  }
  return {pass, detail};
}

Verdict mse_ratio() {
  const auto nr = nr_sweep();
  const auto fr = fr_sweep();
  const auto& n = nr.points[1].estimators[0];
  const auto& f = fr.points[0].estimators[0];
  if (!n.mse || !f.mse) return {false, "no successful estimates at 5 ps"};
  const double ratio = *n.mse / *f.mse;
  return {ratio >= 100.0, fmt("MSE_NR %.4g ps^2 over %zu successes, MSE_FR %.4g ps^2, ratio %.1f", *n.mse,
                              n.successes, *f.mse, ratio)};
}

Verdict micro_shift() {
  MicroShiftConfig c;
  c.model = model_tau(0.98, 0.98);
  c.base = 6.567;
  c.shift = 0.003;
  c.samples = 7'900'000;
  const auto r = micro_shift_experiment(c);
  const double tol = 3.0 * std::sqrt(2.0) * 536e-6;
  const double at_04 = crb(0.4, 7.9e6).bound_std;
  const bool pass = std::abs(r.shift_estimate - 0.003) <= tol && std::abs(at_04 / 0.562e-3 - 1.0) < 0.01;
  return {pass, fmt("recovered shift %.2f fs (tolerance +-%.2f fs); CRB std at F=0.4: %.1f as; at model F=%.4f: "
                    "%.1f as, combined %.1f as",
                    1e3 * r.shift_estimate, 1e3 * tol, 1e6 * at_04, r.fisher, 1e6 * r.estimate_std,
                    1e6 * r.combined_std)};
}

Verdict sampler_fidelity() {
  const double t = 2.0, eta = 0.9;
  SamplerConfig sc;
  sc.model = model_tau(0.98, eta);
  sc.true_delay = t;
  sc.count = 100000;
  sc.seed = 1;
  const auto recs = draw_records(sc).records;
  const double sigma = sc.model.sigma;
  const double sd = std::sqrt(2.0) * sigma;
  std::vector<double> xs;
  xs.reserve(recs.size());
  for (const auto& r : recs) xs.push_back(r.d_omega);
  const double d = oracle::ks_statistic(xs, [&](double x) { return oracle::normal_cdf(x, 0.0, sd); });
  const double p = oracle::ks_pvalue(d, xs.size());

  const int strata = 50;
  double worst = 0.0;
  for (int s = 0; s < strata; ++s) {
    const double lo = -3.0 * sd + 6.0 * sd * s / strata, hi = lo + 6.0 * sd / strata;
    std::size_t n = 0, nb = 0;
    for (const auto& r : recs)
      if (r.d_omega >= lo && r.d_omega < hi) {
        ++n;
        nb += r.delta == Outcome::bunching;
      }
    const double mass = oracle::integrate([&](double w) { return oracle::jsd(sigma, w); }, lo, hi, 4);
    const double pb = oracle::integrate(
                          [&](double w) { return oracle::jsd(sigma, w) * 0.5 * (1 + eta * eta * std::cos(w * t)); },
                          lo, hi, 4) /
                      mass;
    const double se = std::sqrt(pb * (1 - pb) / static_cast<double>(n));
    worst = std::max(worst, std::abs(static_cast<double>(nb) / static_cast<double>(n) - pb) / se);
  }
  return {p > 0.01 && worst < 4.0, fmt("KS D=%.5f p=%.3f; worst stratum %.2f SE", d, p, worst)};
}

Verdict marginalization() {
  double worst = 0.0;
  for (double eta : {0.5, 0.98, 1.0}) {
    const auto m = model_tau(0.98, eta);
    const double L = 12.0 * std::sqrt(2.0) * m.sigma;
    for (double t : {0.0, 1.0, 3.0, 10.0})
      for (Outcome d : {Outcome::bunching, Outcome::coincidence}) {
        const double integral =
            oracle::integrate([&](double w) { return prob_freq_resolved(m, t, w, d); }, -L, L, 400);
        worst = std::max(worst, std::abs(integral - prob_nonresolved(m, t, d)));
      }
  }
  return {worst < 1e-9, fmt("max |int P_FR dw - P_NR| = %.2e", worst)};
}

Verdict allan() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> x(1'000'000);
  for (auto& v : x) v = nd(rng);
  const std::vector<std::size_t> ms{10, 100, 1000};
  const auto pts = allan_variance(x, ms);
  double worst = 0.0;
  std::string detail;
  for (const auto& p : pts) {
    const double ratio = p.variance * static_cast<double>(p.cluster_size);
    worst = std::max(worst, std::abs(ratio - 1.0));
    detail += fmt("m=%zu: m*sigma^2/v=%.4f ", p.cluster_size, ratio);
  }
  return {worst < 0.10, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "QFI constant", 1, qfi_constant},
      {2, "NR Fisher peak and width", 1, nr_peak},
      {3, "quantum-limit saturation", 10, quantum_limit},
      {4, "finite-resolution convergence", 120, finite_resolution},
      {5, "estimator efficiency", 120, efficiency},
      {6, "dynamic-range contrast", 300, dynamic_range},
      {7, "MSE-ratio advantage", 120, mse_ratio},
      {8, "micro-shift resolution", 600, micro_shift},
      {9, "sampler fidelity", 30, sampler_fidelity},
      {10, "marginalization identity", 5, marginalization},
      {11, "Allan scaling", 10, allan},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = r.pass && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << " AC" << c.id << " " << c.name << ": " << r.detail
              << fmt(" [%.2f s of %.0f s%s]", secs, c.limit_s, in_time ? "" : ", over time limit") << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
