// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "favard/cloud.hpp"
#include "favard/errors.hpp"
#include "favard/favard_crofton.hpp"
#include "favard/geom_core.hpp"
#include "favard/parallel.hpp"
#include "favard/quadrature.hpp"
#include "favard/rng.hpp"

namespace favard {

// n^2 regular polygons centred on the grid (k/(n+1), l/(n+1)), k, l in [n].
// Each polygon is scaled about its centre so its perimeter is n^-2, which
// makes the total length 1.
struct GridScene {
  int n = 0;
  int poly_sides = 0;
  std::vector<Vec2> centers;
  double nominal_radius = 0.0;  // 1 / (2 pi n^2), radius of the circles and disks
  double polygon_radius = 0.0;  // circumradius after the length rescale
  double min_disk_distance = 0.0;
  SegmentSet E;

  // Polygon perimeter at the nominal circumradius, before the rescale.
  double raw_perimeter() const { return 2.0 * poly_sides * nominal_radius * std::sin(kPi / poly_sides); }
  double edge_length() const { return 2.0 * polygon_radius * std::sin(kPi / poly_sides); }
};

inline Polyline regular_polygon(Vec2 c, double radius, int sides) {
  std::vector<Vec2> v;
  for (int i = 0; i < sides; ++i) v.push_back(c + unit_vector(2 * kPi * i / sides) * radius);
  v.push_back(v.front());
  return Polyline(v);
}

inline GridScene generate_grid_set(int n, int poly_sides = 32) {
  if (n < 2) throw ValidationError("generate_grid_set", "n must be at least 2");
  if (poly_sides < 16) throw ValidationError("generate_grid_set", "poly_sides must be at least 16");
  GridScene g;
  g.n = n;
  g.poly_sides = poly_sides;
  g.nominal_radius = 1.0 / (2 * kPi * n * n);
  g.polygon_radius = 1.0 / (2.0 * n * n * poly_sides * std::sin(kPi / poly_sides));
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= n; ++l) g.centers.push_back({static_cast<double>(k) / (n + 1), static_cast<double>(l) / (n + 1)});
  std::vector<Polyline> polys;
  for (const auto& c : g.centers) polys.push_back(regular_polygon(c, g.polygon_radius, poly_sides));
  g.E = SegmentSet(std::move(polys), std::sqrt(2.0));

  // Closest grid neighbours are 1/(n+1) apart; the polygons sit inside disks
  // of radius polygon_radius.
  g.min_disk_distance = 1.0 / (n + 1) - 2 * std::max(g.nominal_radius, g.polygon_radius);
  if (g.min_disk_distance < 1.0 / (2 * n)) throw Error("generate_grid_set", "internal: separation violated");
  const double lo = g.centers.front().x - g.polygon_radius, hi = g.centers.back().x + g.polygon_radius;
  if (lo < 0 || hi > 1) throw Error("generate_grid_set", "internal: polygon leaves the unit square");
  return g;
}

struct EnergyEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

inline constexpr int kEnergyShards = 64;

// I_1 of the normalized area measure on a union of equal disks, from
// independent pairs: pick a disk uniformly, then a uniform point in it.
inline EnergyEstimate energy_I1_disks(const std::vector<Vec2>& centers, double radius, std::int64_t samples,
                                      std::uint64_t seed) {
  if (samples < 100000) throw ValidationError("energy_I1", "mc_samples must be at least 1e5");
  if (centers.empty() || !(radius > 0)) throw ValidationError("energy_I1", "need at least one disk of positive radius");
  auto point = [&](Rng& rng) {
    const Vec2 c = centers[rng.below(centers.size())];
    const double r = radius * std::sqrt(rng.uniform()), a = 2 * kPi * rng.uniform();
    return c + unit_vector(a) * r;
  };
  std::vector<double> sum(kEnergyShards), sum_sq(kEnergyShards);
  parallel_for(kEnergyShards, [&](std::size_t k) {
    Rng rng(seed, k);
    const std::int64_t lo = samples * static_cast<std::int64_t>(k) / kEnergyShards;
    const std::int64_t hi = samples * static_cast<std::int64_t>(k + 1) / kEnergyShards;
    double s = 0.0, s2 = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const Vec2 x = point(rng), y = point(rng);
      const double d = (x - y).norm();
      if (d == 0.0) continue;  // probability zero; keeps the sum finite
      s += 1.0 / d;
      s2 += 1.0 / (d * d);
    }
    sum[k] = s;
    sum_sq[k] = s2;
  });
  const double n = static_cast<double>(samples);
  const double mean = pairwise_sum(sum) / n;
  const double var = std::max(0.0, pairwise_sum(sum_sq) / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

inline EnergyEstimate energy_I1(const GridScene& g, std::int64_t samples, std::uint64_t seed) {
  return energy_I1_disks(g.centers, g.nominal_radius, samples, seed);
}

// Shadows of n^2 small polygons switch overlap at many angles, so halving
// converges slowly; 1e-6 keeps the n = 16 sweep near ten seconds.
inline QuadratureConfig grid_quadrature() {
  QuadratureConfig q;
  q.tol = 1e-6;
  q.max_panels = 1 << 18;
  return q;
}

struct FavardProxy {
  double fav = 0.0;
  double fav_error = 0.0;
  double I1 = 0.0;
  double I1_stderr = 0.0;
  double inv_energy = 0.0;
};

inline FavardProxy favard_proxy(const GridScene& g, const QuadratureConfig& q, std::int64_t samples, std::uint64_t seed) {
  const auto fav = favard_length(g.E, q);
  const auto e = energy_I1(g, samples, seed);
  return {fav.value, fav.error_estimate, e.value, e.stderr_, 1.0 / e.value};
}

// Cells of the scene sampled once and grouped by polygon.
struct GridCells {
  WeightedCloud cloud;
  std::vector<std::size_t> begin;  // cells of polygon j are [begin[j], begin[j + 1])
  double step = 0.0;
};

inline GridCells grid_cells(const GridScene& g, double step) {
  GridCells c{sample_cloud(g.E, step), {}, step};
  c.begin.assign(g.centers.size() + 1, c.cloud.size());
  for (std::size_t i = c.cloud.size(); i-- > 0;) c.begin[g.E.polyline_of(c.cloud.points[i].segment)] = i;
  for (std::size_t j = g.centers.size(); j-- > 0;) c.begin[j] = std::min(c.begin[j], c.begin[j + 1]);
  return c;
}

inline double distance_to_polyline(Vec2 p, const Polyline& G) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& e : G.edges()) d = std::min(d, e.distance_to(p));
  return d;
}

// Length of the cells whose centre lies within step / 2 of the graph.
inline double graph_incidence_mass(const GridScene& g, const GridCells& c, const Polyline& G) {
  double m = 0.0;
  for (std::size_t j = 0; j < g.centers.size(); ++j) {
    if (distance_to_polyline(g.centers[j], G) > g.polygon_radius + c.step) continue;
    for (std::size_t i = c.begin[j]; i < c.begin[j + 1]; ++i)
      if (distance_to_polyline(c.cloud.points[i].p, G) <= 0.5 * c.step) m += c.cloud.points[i].weight;
  }
  return m;
}

// Graph over the line through (1/2, 1/2) with direction angle phi: heights
// h(t) at 50 breakpoints spread over t in [-3/4, 3/4], slopes uniform in [-M, M].
inline Polyline random_lipschitz_graph(Rng& rng, double M, int breakpoints = 50) {
  const double phi = rng.uniform(0, kPi);
  const Vec2 o{0.5, 0.5}, b = unit_vector(phi), nrm = unit_vector(phi + kPi / 2);
  const double R = 0.75, dt = 2 * R / breakpoints;
  double h = rng.uniform(-0.5, 0.5);
  std::vector<Vec2> v{o + b * -R + nrm * h};
  for (int i = 1; i <= breakpoints; ++i) {
    h += dt * rng.uniform(-M, M);
    v.push_back(o + b * (-R + i * dt) + nrm * h);
  }
  return Polyline(v);
}

// Graph over direction phi that runs along the lower arc of each listed
// polygon, as far as the arc's slopes stay within M, and straight between.
inline Polyline arc_following_graph(const GridScene& g, const std::vector<std::size_t>& path, double phi, double M) {
  const Vec2 b = unit_vector(phi), nrm = unit_vector(phi + kPi / 2);
  std::vector<Vec2> out;
  for (std::size_t j : path) {
    const auto& vs = g.E.polylines()[j].vertices();
    const int s = g.poly_sides;
    auto h = [&](int i) { return vs[((i % s) + s) % s].dot(nrm); };
    auto t = [&](int i) { return vs[((i % s) + s) % s].dot(b); };
    const double hc = g.centers[j].dot(nrm);
    // Edge (i, i + 1) belongs to the arc if it is below the centre and flat enough.
    auto ok = [&](int i) {
      return 0.5 * (h(i) + h(i + 1)) < hc && std::abs(h(i + 1) - h(i)) <= M * std::abs(t(i + 1) - t(i)) * (1 + 1e-12);
    };
    int bottom = 0;
    for (int i = 1; i < s; ++i)
      if (h(i) < h(bottom)) bottom = i;
    int lo = bottom, hi = bottom;
    while (hi - lo < s && ok(hi)) ++hi;
    while (hi - lo < s && ok(lo - 1)) --lo;
    std::vector<Vec2> arc;
    for (int i = lo; i <= hi; ++i) arc.push_back(vs[((i % s) + s) % s]);
    if (arc.front().dot(b) > arc.back().dot(b)) std::reverse(arc.begin(), arc.end());
    out.insert(out.end(), arc.begin(), arc.end());
  }
  return Polyline(out);
}

// Rows and the main diagonal of the grid, each followed along its arcs.
inline std::vector<Polyline> adversarial_graphs(const GridScene& g, double M) {
  std::vector<Polyline> out;
  const auto n = static_cast<std::size_t>(g.n);
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<std::size_t> row;
    for (std::size_t k = 0; k < n; ++k) row.push_back(k * n + l);
    out.push_back(arc_following_graph(g, row, 0.0, M));
  }
  std::vector<std::size_t> diag;
  for (std::size_t k = 0; k < n; ++k) diag.push_back(k * n + k);
  out.push_back(arc_following_graph(g, diag, kPi / 4, M));
  return out;
}

struct LipschitzSearch {
  double max_random = 0.0;
  int argmax_trial = -1;
  double max_adversarial = 0.0;
  double max_mass() const { return std::max(max_random, max_adversarial); }
};

inline LipschitzSearch lipschitz_intersection_mass(const GridScene& g, double M, int trials, std::uint64_t seed,
                                                   double step = 0.0) {
  if (!(M >= 1)) throw ValidationError("lipschitz_intersection_mass", "M must be at least 1");
  if (step <= 0) step = g.edge_length() / 8;
  const GridCells cells = grid_cells(g, step);
  std::vector<double> mass(static_cast<std::size_t>(std::max(trials, 0)));
  parallel_for(mass.size(), [&](std::size_t i) {
    Rng rng(seed, i);
    mass[i] = graph_incidence_mass(g, cells, random_lipschitz_graph(rng, M));
  });
  LipschitzSearch out;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mass[i] > out.max_random) {
      out.max_random = mass[i];
      out.argmax_trial = static_cast<int>(i);
    }
  for (const auto& G : adversarial_graphs(g, M)) out.max_adversarial = std::max(out.max_adversarial, graph_incidence_mass(g, cells, G));
  return out;
}

struct GridSweepRow {
  int n = 0;
  double fav = 0.0;
  double I1 = 0.0;
  double I1_stderr = 0.0;
  double inv_energy = 0.0;
  double max_lip_mass = 0.0;
  double max_random_lip_mass = 0.0;
};

struct GridSweepConfig {
  std::vector<int> ns{2, 4, 8, 16};
  int poly_sides = 32;
  std::int64_t mc_samples = 1000000;
  int trials = 1000;
  double M = 1.0;
  std::uint64_t seed = 0;
  QuadratureConfig quad = grid_quadrature();
};

inline std::vector<GridSweepRow> grid_sweep(const GridSweepConfig& c) {
  std::vector<GridSweepRow> rows;
  for (int n : c.ns) {
    const GridScene g = generate_grid_set(n, c.poly_sides);
    const FavardProxy p = favard_proxy(g, c.quad, c.mc_samples, c.seed);
    const LipschitzSearch s = lipschitz_intersection_mass(g, c.M, c.trials, c.seed);
    rows.push_back({n, p.fav, p.I1, p.I1_stderr, p.inv_energy, s.max_mass(), s.max_random});
  }
  return rows;
}

inline void write_grid_csv(std::ostream& os, const std::vector<GridSweepRow>& rows) {
  os << "n,fav,I1,inv_energy,max_lip_mass\n";
  os.precision(17);
  for (const auto& r : rows) os << r.n << ',' << r.fav << ',' << r.I1 << ',' << r.inv_energy << ',' << r.max_lip_mass << '\n';
}

}  // namespace favard
