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

// Precision bounds for delay estimation: quantum Fisher information, the
// non-resolved and frequency-resolved Fisher information (ideal and with
// finite resolution), and Cramer-Rao bounds.
//
// The resolved integrand is derived from E[(d/d dt log P)^2] of the resolved
// density, which gives eta^4 int C(w) w^2 sin^2(w dt) / (1 - eta^4 cos^2(w dt)) dw
// and saturates 2 sigma^2 at eta = 1.

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "homdelay/detector.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

enum class FisherMethod { non_resolved, resolved_ideal, resolved_binned };

std::string_view to_string(FisherMethod method);
/// Accepts "nr"/"nonresolved", "ideal"/"resolved_ideal", "binned"/"resolved_binned".
FisherMethod fisher_method_from_string(std::string_view name);

struct FisherOptions {
  double quad_tol = 1e-8;
  /// Multiply by gamma^2 (detection losses) instead of the post-selected form.
  bool physical_loss = false;
};

/// 2 sigma^2.
double qfi(const PhotonPairModel& model);

/// 4 sigma^4 dt^2 eta^4 / (exp(2 sigma^2 dt^2) - eta^4); returns the QFI in the
/// eta = 1, dt = 0 limit.
double fisher_nonresolved(const PhotonPairModel& model, double delta_t);

/// Throws QuadratureError if the tolerance cannot be met.
double fisher_resolved_ideal(const PhotonPairModel& model, double delta_t,
                             const FisherOptions& opts = {});

struct BinnedFisher {
  double total = 0.0;
  std::vector<double> per_bin;  // F_n for n = 0..n_max
};

/// Sum over bins of (dP_n/d dt)^2 (1/P_{n,+} + 1/P_{n,-}), with dP/d dt obtained
/// by differentiating under the integral. Throws CoverageError or QuadratureError.
BinnedFisher fisher_resolved_binned(const PhotonPairModel& model, const BinnedDetectorSpec& spec,
                                    double delta_t, const FisherOptions& opts = {});

struct CrbReport {
  double fisher_per_sample = 0.0;  // ps^-2
  double sample_count = 0.0;
  double bound = 0.0;              // ps^2
  double bound_std = 0.0;          // ps
};

/// var >= 1 / (N F). Throws DomainError for F <= 0 or N < 1.
CrbReport crb(double fisher_per_sample, double sample_count);

struct FisherPoint {
  double delta_t = 0.0;  // ps
  double fisher = 0.0;   // ps^-2
  double eta = 1.0;
};

struct FisherCurve {
  FisherMethod method = FisherMethod::non_resolved;
  std::optional<double> epsilon;  // rad/ps, binned curves only
  double quad_tol = 0.0;
  std::vector<FisherPoint> points;
};

/// Indistinguishability as a function of delay; empty means "use model.eta".
using EtaOfDelay = std::function<double(double)>;

FisherCurve fisher_curve(FisherMethod method, const PhotonPairModel& model,
                         std::span<const double> delays, const EtaOfDelay& eta_of = {},
                         const std::optional<BinnedDetectorSpec>& spec = std::nullopt,
                         const FisherOptions& opts = {});

}  // namespace homdelay
