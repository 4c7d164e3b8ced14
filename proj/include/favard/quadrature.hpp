// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "favard/errors.hpp"
#include "favard/interval_union.hpp"
#include "favard/parallel.hpp"

namespace favard {

struct QuadratureConfig {
  int order = 8;                // Gauss-Legendre points per panel
  int initial_panels = 64;      // over [0, pi]
  double tol = 1e-8;            // stop when two successive differences are below tol
  int max_panels = 1 << 16;
};

struct GaussRule {
  std::vector<double> x;  // on [-1, 1]
  std::vector<double> w;
};

namespace detail {
template <unsigned N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  GaussRule r;
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0.0) continue;
    r.x.push_back(-a[i]);
    r.w.push_back(wt[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.x.push_back(a[i]);
    r.w.push_back(wt[i]);
  }
  return r;
}
}  // namespace detail

inline const GaussRule& gauss_rule(int order) {
  static const GaussRule r4 = detail::make_rule<4>();
  static const GaussRule r8 = detail::make_rule<8>();
  static const GaussRule r12 = detail::make_rule<12>();
  static const GaussRule r16 = detail::make_rule<16>();
  static const GaussRule r20 = detail::make_rule<20>();
  switch (order) {
    case 4: return r4;
    case 8: return r8;
    case 12: return r12;
    case 16: return r16;
    case 20: return r20;
    default: throw ValidationError("quadrature", "unsupported Gauss-Legendre order " + std::to_string(order));
  }
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

template <std::size_t K>
struct QuadratureResultK {
  std::array<double, K> value{};
  std::array<double, K> error_estimate{};
  int panels = 0;
};

// Composite rule with `panels` equal panels on [a, b]; fn returns K values
// per node. Panel sums are combined by pairwise summation in panel order.
template <std::size_t K, class Fn>
std::array<double, K> composite_gauss(Fn&& fn, double a, double b, int panels, const GaussRule& rule) {
  const double h = (b - a) / panels;
  std::vector<std::array<double, K>> per(panels);
  parallel_for(static_cast<std::size_t>(panels), [&](std::size_t p) {
    const double c = a + (p + 0.5) * h;
    std::array<double, K> acc{};
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const std::array<double, K> v = fn(c + 0.5 * h * rule.x[q]);
      for (std::size_t k = 0; k < K; ++k) acc[k] += rule.w[q] * v[k];
    }
    for (std::size_t k = 0; k < K; ++k) acc[k] *= 0.5 * h;
    per[p] = acc;
  });
  std::array<double, K> out{};
  std::vector<double> col(panels);
  for (std::size_t k = 0; k < K; ++k) {
    for (int p = 0; p < panels; ++p) col[p] = per[p][k];
    out[k] = pairwise_sum(col);
  }
  return out;
}

// Halves the panel width until every component changes by less than tol on
// two consecutive halvings. The integrands have derivative jumps at angles
// that fall anywhere inside a panel, so a single small difference can be a
// coincidence; the reported error is the larger of the last two differences.
template <std::size_t K, class Fn>
QuadratureResultK<K> integrate_halving(Fn&& fn, double a, double b, const QuadratureConfig& q) {
  if (!(q.tol > 0)) throw ValidationError("quadrature", "tol must be positive");
  const GaussRule& rule = gauss_rule(q.order);
  int panels = q.initial_panels;
  auto prev = composite_gauss<K>(fn, a, b, panels, rule);
  std::array<double, K> last_diff{};
  bool last_small = false;
  while (true) {
    const int next = panels * 2;
    if (next > q.max_panels)
      throw QuadratureNotConverged("no convergence within " + std::to_string(q.max_panels) + " panels");
    auto cur = composite_gauss<K>(fn, a, b, next, rule);
    QuadratureResultK<K> r;
    bool small = true;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = std::abs(cur[k] - prev[k]);
      r.error_estimate[k] = std::max(d, last_diff[k]);
      last_diff[k] = d;
      if (!(d < q.tol)) small = false;
    }
    panels = next;
    if (small && last_small) {
      r.value = cur;
      r.panels = panels;
      return r;
    }
    last_small = small;
    prev = cur;
  }
}

template <class Fn>
QuadratureResult integrate_angles(Fn&& fn, const QuadratureConfig& q) {
  auto r = integrate_halving<1>([&](double t) { return std::array<double, 1>{fn(t)}; }, 0.0, kPi, q);
  return {r.value[0], r.error_estimate[0], r.panels};
}

// Node positions of the composite rule on [0, pi] (for CSV profiles).
inline std::vector<double> quadrature_nodes(int panels, int order) {
  const GaussRule& rule = gauss_rule(order);
  const double h = kPi / panels;
  std::vector<double> out;
  for (int p = 0; p < panels; ++p)
    for (double x : rule.x) out.push_back((p + 0.5) * h + 0.5 * h * x);
  return out;
}

}  // namespace favard
