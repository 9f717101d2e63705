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

// Adaptive 7/15-point Gauss-Kronrod integration over panels of bounded width.
// The panel bound keeps oscillatory integrands (beat notes in cos(dw * dt))
// resolved. Nodes and weights come from Boost.Math.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "homdelay/errors.hpp"

namespace homdelay {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  double max_panel_width = std::numeric_limits<double>::infinity();
  unsigned max_depth = 12;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // summed Kronrod error estimate
  double l1 = 0.0;     // Kronrod estimate of the integral of |f|
  std::size_t panels = 0;
};

namespace detail {

using Kronrod15 = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss7 = boost::math::quadrature::gauss<double, 7>;

struct Panel {
  double value, error, l1;
};

template <class F>
Panel gk15(F& f, double lo, double hi) {
  const auto& x = Kronrod15::abscissa();
  const auto& wk = Kronrod15::weights();
  const auto& wg = Gauss7::weights();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f0 = f(mid);
  double k = f0 * wk[0];
  double g = f0 * wg[0];
  double l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double a = f(mid - half * x[i]);
    const double b = f(mid + half * x[i]);
    k += (a + b) * wk[i];
    l1 += (std::abs(a) + std::abs(b)) * wk[i];
    if (i % 2 == 0) g += (a + b) * wg[i / 2];
  }
  return {k * half, std::abs(k - g) * half, l1 * std::abs(half)};
}

// Bisects until each leaf meets rel_tol against its own L1 norm or its share of abs_tol.
template <class F>
Panel adapt(F& f, double lo, double hi, double abs_share, double rel_tol, unsigned depth) {
  const Panel p = gk15(f, lo, hi);
  const double rounding = 50.0 * std::numeric_limits<double>::epsilon() * p.l1;
  if (depth == 0 || p.error <= std::max({abs_share, rel_tol * p.l1, rounding})) return p;
  const double mid = 0.5 * (lo + hi);
  const Panel left = adapt(f, lo, mid, 0.5 * abs_share, rel_tol, depth - 1);
  const Panel right = adapt(f, mid, hi, 0.5 * abs_share, rel_tol, depth - 1);
  return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

}  // namespace detail

/// Throws QuadratureError if the summed error estimate exceeds the tolerance
/// once max_depth bisections are exhausted.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  QuadratureResult out;
  if (b == a) return out;
  const double width = b - a;
  std::size_t panels = 1;
  if (std::isfinite(opts.max_panel_width) && opts.max_panel_width > 0.0)
    panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(width) / opts.max_panel_width)));
  const double h = width / static_cast<double>(panels);
  const double abs_share = opts.abs_tol / static_cast<double>(panels);
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + h * static_cast<double>(i);
    const double hi = (i + 1 == panels) ? b : lo + h;
    const detail::Panel p = detail::adapt(f, lo, hi, abs_share, opts.rel_tol, opts.max_depth);
    out.value += p.value;
    out.error += p.error;
    out.l1 += p.l1;
  }
  out.panels = panels;
  const double allowed = std::max({opts.abs_tol, opts.rel_tol * out.l1,
                                   50.0 * std::numeric_limits<double>::epsilon() * out.l1});
  if (!(out.error <= allowed + std::numeric_limits<double>::min())) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] reached error " << out.error
        << " against allowed " << allowed;
    throw QuadratureError(msg.str());
  }
  return out;
}

}  // namespace homdelay
