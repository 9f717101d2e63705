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

#include <cmath>
#include <vector>

#include "doctest.h"

#include "homdelay/errors.hpp"
#include "homdelay/estimators.hpp"
#include "homdelay/sampler.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

using namespace homdelay;
using doctest::Approx;

namespace {

SamplerConfig config(double eta, double t, std::size_t n, std::uint64_t seed) {
  SamplerConfig sc;
  sc.model = fixtures::model_sigma(0.5102, eta);
  sc.true_delay = t;
  sc.count = n;
  sc.seed = seed;
  return sc;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("config validation") {
  SamplerConfig sc = config(0.9, 1.0, 0, 1);
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  sc.count = 10;
  sc.true_delay = std::nan("");
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  sc.true_delay = 1.0;
  sc.binning = BinnedDetectorSpec{0.0069, 10};
  CHECK_THROWS_AS(sc.validate(), CoverageError);
}

TEST_CASE("identical configs give bit-identical streams") {
  SamplerConfig sc = config(0.9, 3.0, 5000, 42);
  sc.emit_mean_freq = true;
  sc.binning = BinnedDetectorSpec::for_model(sc.model, 0.0069);
  const auto a = draw_records(sc).records;
  const auto b = draw_records(sc).records;
  REQUIRE(a.size() == b.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    same = same && a[i].delta == b[i].delta && a[i].d_omega == b[i].d_omega &&
           a[i].mean_freq == b[i].mean_freq && a[i].bin_index == b[i].bin_index;
  CHECK(same);
  sc.seed = 43;
  CHECK(draw_records(sc).records[0].d_omega != a[0].d_omega);
  CHECK(derive_stream_seed(100, 7) == 107);
}

TEST_CASE("pull stream matches batch draw") {
  const SamplerConfig sc = config(0.7, 2.0, 300, 9);
  RecordStream stream(sc);
  const auto batch = draw_records(sc);
  std::size_t i = 0;
  while (auto r = stream.next()) {
    REQUIRE(i < batch.records.size());
    CHECK(r->d_omega == batch.records[i].d_omega);
    ++i;
  }
  CHECK(i == batch.records.size());
  CHECK(stream.stats().emitted == 300);
}

TEST_CASE("perfect overlap at zero delay always bunches") {
  const auto counts = count_outcomes(draw_records(config(1.0, 0.0, 100000, 3)).records);
  CHECK(counts.coincidence == 0);
  CHECK(counts.bunching == 100000);
}

TEST_CASE("distinguishable photons give a fair coin") {
  const auto counts = count_outcomes(draw_records(config(0.0, 1.3, 1'000'000, 4)).records);
  const double p = static_cast<double>(counts.bunching) / 1e6;
  CHECK(std::abs(p - 0.5) < 3.0 * std::sqrt(0.25 / 1e6));
}

TEST_CASE("coincidence fraction at one coherence time") {
  const auto counts = count_outcomes(draw_records(config(0.98, 0.98, 1'000'000, 5)).records);
  const double f = static_cast<double>(counts.coincidence) / 1e6;
  CHECK(std::abs(f - 0.1260) < 0.001);
  CHECK(std::abs(f - oracle::p_nr(0.5102, 0.98, 0.98, -1)) < 3.0 * std::sqrt(0.126 * 0.874 / 1e6));
}

TEST_CASE("frequency differences follow the Gaussian marginal") {
  const auto batch = draw_records(config(0.9, 4.0, 100000, 6));
  std::vector<double> w;
  for (const auto& r : batch.records) w.push_back(r.d_omega);
  const double sd = std::sqrt(2.0) * 0.5102;
  const double d = oracle::ks_statistic(w, [&](double x) { return oracle::normal_cdf(x, 0.0, sd); });
  CHECK(oracle::ks_pvalue(d, w.size()) > 0.01);
}

TEST_CASE("conditional bunching frequency in dOmega strata") {
  const double t = 2.0, eta = 0.9;
  const auto batch = draw_records(config(eta, t, 100000, 8));
  const double sd = std::sqrt(2.0) * 0.5102;
  const int strata = 50;
  std::vector<double> lo(strata), hi(strata);
  for (int s = 0; s < strata; ++s) {
    lo[s] = -3.0 * sd + 6.0 * sd * s / strata;
    hi[s] = lo[s] + 6.0 * sd / strata;
  }
  for (int s = 0; s < strata; ++s) {
    std::size_t n = 0, nb = 0;
    for (const auto& r : batch.records)
      if (r.d_omega >= lo[s] && r.d_omega < hi[s]) {
        ++n;
        nb += r.delta == Outcome::bunching;
      }
    REQUIRE(n > 0);
    // Expected frequency: the conditional averaged over the stratum under C.
    const double mass = oracle::integrate([&](double w) { return oracle::jsd(0.5102, w); }, lo[s], hi[s], 4);
    const double pb = oracle::integrate([&](double w) { return oracle::jsd(0.5102, w) * 0.5 * (1 + eta * eta * std::cos(w * t)); },
                                        lo[s], hi[s], 4) / mass;
    const double freq = static_cast<double>(nb) / static_cast<double>(n);
    const double se = std::sqrt(std::max(pb * (1 - pb), 1e-12) / static_cast<double>(n));
    CHECK(std::abs(freq - pb) < 4.0 * se + 1e-12);
  }
}

TEST_CASE("physical loss thins by gamma squared") {
  SamplerConfig sc = config(0.9, 1.0, 1'000'000, 10);
  sc.model.gamma = 0.8;
  sc.loss_mode = LossMode::physical;
  const auto batch = draw_records(sc);
  const double keep = 0.64;
  const double kept = static_cast<double>(batch.stats.kept());
  CHECK(batch.stats.emitted == 1'000'000);
  CHECK(batch.records.size() == batch.stats.kept());
  CHECK(std::abs(kept / 1e6 - keep) < 3.0 * std::sqrt(keep * (1 - keep) / 1e6));

  sc.loss_mode = LossMode::post_selected;
  const auto all = draw_records(sc);
  CHECK(all.records.size() == 1'000'000);
  CHECK(all.stats.loss_dropped == 0);
}

TEST_CASE("binning stamps bin indices within range") {
  SamplerConfig sc = config(0.9, 5.0, 200000, 12);
  sc.binning = BinnedDetectorSpec::for_model(sc.model, 0.0069);
  const auto batch = draw_records(sc);
  CHECK(batch.stats.kept() + batch.stats.range_dropped == 200000);
  bool ok = true;
  for (const auto& r : batch.records) ok = ok && r.bin_index && *r.bin_index <= sc.binning->n_max;
  CHECK(ok);
}

TEST_CASE("joint spectral intensity") {
  SamplerConfig sc = config(1.0, 0.0, 50000, 13);
  sc.emit_mean_freq = true;
  const auto grid = JsiGridSpec::centred(sc.model.omega0, 3.0, 150);
  const auto jsi0 = empirical_jsi(draw_records(sc).records, grid);
  CHECK(jsi0.total(Outcome::coincidence) == 0);
  CHECK(jsi0.total(Outcome::bunching) + jsi0.out_of_range == 50000);

  SamplerConfig bare = sc;
  bare.emit_mean_freq = false;
  CHECK_THROWS_AS(empirical_jsi(draw_records(bare).records, grid), ConfigError);

  // Fringe period along dOmega at 6.5 ps, from the bunching share of each
  // anti-diagonal: scan the beat frequency that best explains it.
  sc.model.eta = 1.0;
  sc.true_delay = 6.5;
  sc.count = 400000;
  const auto records = draw_records(sc).records;
  const auto jsi = empirical_jsi(records, grid);
  const auto mb = jsi.d_omega_marginal(Outcome::bunching);
  const auto mc = jsi.d_omega_marginal(Outcome::coincidence);
  const double h = 6.0 / 150.0;
  double best_t = 0.0, best = -1e300;
  for (double t = 5.0; t <= 8.0; t += 0.001) {
    double s = 0.0;
    for (std::size_t k = 0; k < mb.size(); ++k) {
      const double total = static_cast<double>(mb[k] + mc[k]);
      if (total < 50) continue;
      const double dw = (static_cast<double>(k) - 149.0) * h;
      s += (static_cast<double>(mb[k]) - static_cast<double>(mc[k])) * std::cos(dw * t);
    }
    if (s > best) {
      best = s;
      best_t = t;
    }
  }
  CHECK(2.0 * kPi / best_t == Approx(0.967).epsilon(0.02));

  // The marginal over the anti-diagonals carries every in-range record and
  // reproduces the dOmega sample mean to within one cell.
  std::size_t sum = 0;
  double first_moment = 0.0;
  for (std::size_t k = 0; k < mb.size(); ++k) {
    sum += mb[k] + mc[k];
    first_moment += static_cast<double>(mb[k] + mc[k]) * (static_cast<double>(k) - 149.0) * h;
  }
  CHECK(sum == jsi.total(Outcome::bunching) + jsi.total(Outcome::coincidence));
  double direct = 0.0;
  std::size_t in_range = 0;
  for (const auto& r : records) {
    const double w1 = *r.omega1(), w2 = *r.omega2();
    if (w1 < grid.omega1_min || w1 >= grid.omega1_max || w2 < grid.omega2_min || w2 >= grid.omega2_max) continue;
    direct += r.d_omega;
    ++in_range;
  }
  CHECK(in_range == sum);
  CHECK(std::abs(first_moment / sum - direct / in_range) < h);
}

}  // TEST_SUITE
