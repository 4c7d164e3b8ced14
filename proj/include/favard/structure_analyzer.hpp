// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "favard/cloud.hpp"
#include "favard/config.hpp"
#include "favard/errors.hpp"
#include "favard/favard_crofton.hpp"
#include "favard/geom_core.hpp"
#include "favard/graph_extract.hpp"
#include "favard/line_pair_measure.hpp"
#include "favard/parallel.hpp"

namespace favard {

struct Minigraph {
  Polyline piece;
  std::size_t curve = 0;  // index of the input polyline
  int k = 0;              // direction bucket, v_k = k pi / M2
  int coarse = 0;         // coarse bucket, w_c = c pi / M3
  double mass = 0.0;
};

struct MinigraphFamily {
  double alpha = 0.0;
  double kappa = 0.0;
  int M2 = 0;
  int M3 = 0;
  std::vector<Minigraph> minigraphs;
  std::vector<double> E_mass;  // per direction bucket
  std::vector<double> F_mass;  // per coarse bucket

  double v(int k) const { return k * kPi / M2; }
  double w(int c) const { return c * kPi / M3; }
  double total_mass() const {
    double m = 0.0;
    for (const auto& g : minigraphs) m += g.mass;
    return m;
  }
};

inline int direction_bucket_count(double alpha) {
  return static_cast<int>(std::ceil(kPi / (2 * std::atan(alpha)) - 1e-12));
}

inline int coarse_bucket_count(double alpha, double kappa) {
  return static_cast<int>(std::ceil(kPi / (2 * std::pow(alpha, kappa)) - 1e-12));
}

// Length-weighted mean of line directions (doubled-angle average).
inline double mean_direction(const std::vector<Segment>& edges) {
  double c = 0.0, s = 0.0;
  for (const auto& e : edges) {
    c += e.length() * std::cos(2 * e.direction_angle());
    s += e.length() * std::sin(2 * e.direction_angle());
  }
  return Angle(0.5 * std::atan2(s, c)).value();
}

// Nearest of n equally spaced directions j pi / n; ties go to the lower index.
inline int nearest_direction(double angle, int n) {
  int best = 0;
  double bd = kPi;
  for (int j = 0; j < n; ++j) {
    const double d = angle_distance(angle, j * kPi / n);
    if (d < bd - 1e-15) {
      bd = d;
      best = j;
    }
  }
  return best;
}

// Greedy chopping: a piece grows while some v_k stays within atan(alpha) of
// every edge in it; the piece takes the admissible k nearest its mean direction.
inline MinigraphFamily minigraph_decompose(const std::vector<Polyline>& curves, double alpha, double kappa = 0.1) {
  if (!(alpha > 0)) throw ValidationError("minigraph_decompose", "alpha must be positive");
  MinigraphFamily fam;
  fam.alpha = alpha;
  fam.kappa = kappa;
  fam.M2 = direction_bucket_count(alpha);
  fam.M3 = coarse_bucket_count(alpha, kappa);
  fam.E_mass.assign(fam.M2, 0.0);
  fam.F_mass.assign(fam.M3, 0.0);
  const double tol = std::atan(alpha);
  auto admissible = [&](const Segment& e) {
    std::vector<int> ks;
    for (int k = 0; k < fam.M2; ++k)
      if (angle_distance(e.direction_angle(), fam.v(k)) <= tol + 1e-15) ks.push_back(k);
    return ks;
  };
  auto close = [&](std::size_t curve, std::vector<Segment>& edges, const std::vector<int>& ks) {
    std::vector<Vec2> verts{edges.front().a()};
    for (const auto& e : edges) verts.push_back(e.b());
    const double mean = mean_direction(edges);
    int best = ks.front();
    for (int k : ks)
      if (angle_distance(fam.v(k), mean) < angle_distance(fam.v(best), mean) - 1e-15) best = k;
    Minigraph g{Polyline(verts), curve, best, nearest_direction(fam.v(best), fam.M3), 0.0};
    g.mass = g.piece.length();
    fam.minigraphs.push_back(std::move(g));
    edges.clear();
  };
  for (std::size_t c = 0; c < curves.size(); ++c) {
    std::vector<Segment> edges;
    std::vector<int> ks;
    for (const auto& e : curves[c].edges()) {
      const auto ke = admissible(e);
      std::vector<int> both;
      std::set_intersection(ks.begin(), ks.end(), ke.begin(), ke.end(), std::back_inserter(both));
      if (!edges.empty() && both.empty()) {
        close(c, edges, ks);
        both = ke;
      } else if (edges.empty()) {
        both = ke;
      }
      edges.push_back(e);
      ks = both;
    }
    if (!edges.empty()) close(c, edges, ks);
  }
  for (const auto& g : fam.minigraphs) {
    fam.E_mass[g.k] += g.mass;
    fam.F_mass[g.coarse] += g.mass;
  }
  return fam;
}

inline int circular_distance(int a, int b, int n) {
  const int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

struct CaseSplit {
  enum class Kind { Case1, Case2 } kind = Kind::Case1;
  int window = 0;  // Case1: buckets window .. window + C_sep (mod M3)
  int k = 0, l = 0;
  double complement_mass = 0.0;  // Case1: H^1(E minus window)
};

inline std::vector<int> window_buckets(int start, int C_sep, int M3) {
  std::vector<int> b;
  for (int i = 0; i <= C_sep; ++i) b.push_back((start + i) % M3);
  return b;
}

inline CaseSplit case_split(const MinigraphFamily& fam, double eps, const AnalysisConfig& cfg) {
  const int C_sep = static_cast<int>(std::lround(cfg.C_sep));
  if (fam.M3 < 2 * C_sep)
    throw InsufficientBuckets("case_split", "M3 = " + std::to_string(fam.M3) + " < 2 * C_sep = " + std::to_string(2 * C_sep));
  const double total = fam.total_mass();
  CaseSplit out;
  for (int s = 0; s < fam.M3; ++s) {
    double in = 0.0;
    for (int b : window_buckets(s, C_sep, fam.M3)) in += fam.F_mass[b];
    const double comp = std::max(0.0, total - in);
    if (comp <= eps) {
      out.kind = CaseSplit::Kind::Case1;
      out.window = s;
      out.complement_mass = comp;
      return out;
    }
  }
  out.kind = CaseSplit::Kind::Case2;
  double best = -1;
  for (int k = 0; k < fam.M3; ++k)
    for (int l = k + 1; l < fam.M3; ++l) {
      if (circular_distance(k, l, fam.M3) < C_sep) continue;
      const double m = std::min(fam.F_mass[k], fam.F_mass[l]);
      if (m > best) {
        best = m;
        out.k = k;
        out.l = l;
      }
    }
  return out;
}

// Centre and half-length of the shortest arc (mod pi) holding every direction.
inline std::pair<double, double> minimal_direction_arc(const std::vector<double>& dirs) {
  std::vector<double> a;
  for (double d : dirs) a.push_back(Angle(d).value());
  std::sort(a.begin(), a.end());
  if (a.empty()) return {0.0, 0.0};
  double gap = a.front() + kPi - a.back(), end = a.front();
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] - a[i - 1] > gap) {
      gap = a[i] - a[i - 1];
      end = a[i];
    }
  const double arc = kPi - gap;
  return {Angle(end + arc / 2).value(), arc / 2};
}

inline SegmentSet minigraph_set(const MinigraphFamily& fam, const std::vector<std::size_t>& idx, double radius) {
  std::vector<Polyline> p;
  for (auto i : idx) p.push_back(fam.minigraphs[i].piece);
  return SegmentSet(std::move(p), radius);
}

// Cover of the union of the given minigraphs by one graph over the centre of
// their direction arc, with constant C_lip * max(alpha_min, tan(half arc)).
struct BucketCover {
  SegmentSet set;
  GraphCover cover;
  double alpha_used = 0.0;
};

inline BucketCover cover_minigraphs(const MinigraphFamily& fam, const std::vector<std::size_t>& idx, double alpha_min,
                                    double eps, double radius, const AnalysisConfig& cfg) {
  BucketCover b{minigraph_set(fam, idx, radius), {}, 0.0};
  std::vector<double> dirs;
  for (const auto& s : b.set.segments()) dirs.push_back(s.direction_angle());
  const auto [base, half] = minimal_direction_arc(dirs);
  b.alpha_used = std::max(alpha_min, std::tan(half));
  if (cfg.C_lip * b.alpha_used / 2 > 1)
    throw AssumptionViolated("cover_minigraphs", "directions spread too wide for a single cone-defined graph");
  b.cover = cover_by_single_graph(b.set, b.alpha_used, eps, Angle(base), cfg);
  return b;
}

struct HeavyBall {
  Vec2 center;
  double mass = 0.0;
  int dominant = -1;  // direction bucket j of the dominant refined graph
  AffineLine line;
};

struct Witness {
  int k = 0, l = 0;
  std::vector<HeavyBall> balls_k;  // two
  std::vector<HeavyBall> balls_l;  // three
  int i0 = -1, j0 = -1;
  std::array<std::array<int, 3>, 2> tube_k_meets_ball_l{};  // T^k_i ∩ B(y_j, alpha) != empty
  std::array<std::array<int, 2>, 3> tube_l_meets_ball_k{};  // T^l_j ∩ B(x_i, alpha) != empty
  AffineLine line_k, line_l;
  double inner_halfwidth = 0.0;  // witness_C * alpha
  double outer_halfwidth = 0.0;  // alpha^{1/2}
  WeightedCloud G_k, G_l;
  std::vector<Segment> G_k_pieces, G_l_pieces;
  double alpha = 0.0;
  double mass_threshold = 0.0;
  double separation = 0.0;  // alpha^{2 kappa} / witness_C
  double eta_lower = 0.0;  // defect certificate, filled by analyze

  Tube inner_k() const { return {line_k, inner_halfwidth}; }
  Tube outer_k() const { return {line_k, outer_halfwidth}; }
  Tube inner_l() const { return {line_l, inner_halfwidth}; }
  Tube outer_l() const { return {line_l, outer_halfwidth}; }
};

namespace detail {

// Cell identity independent of which sub-collection a segment was sampled in.
using CellKey = std::tuple<double, double, double, double, double>;
inline CellKey cell_key(const Segment& s, const CloudPoint& q) { return {s.a().x, s.a().y, s.b().x, s.b().y, q.s0}; }

struct RefinedBucket {
  WeightedCloud cells;        // refined F cells (in Gamma and in some gamma_j)
  std::vector<int> graph_of;  // direction bucket j of each cell
  std::vector<Segment> seg_of;
};

inline RefinedBucket refine_bucket(const MinigraphFamily& fam, int c, double radius, const AnalysisConfig& cfg) {
  const double a = fam.alpha, ak = std::pow(a, fam.kappa);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < fam.minigraphs.size(); ++i)
    if (fam.minigraphs[i].coarse == c) idx.push_back(i);
  const BucketCover F = cover_minigraphs(fam, idx, ak, 0.5 * ak * ak, radius, cfg);
  std::map<CellKey, int> refined;  // cell -> direction bucket of its graph
  std::map<int, std::vector<std::size_t>> by_j;
  for (auto i : idx) by_j[fam.minigraphs[i].k].push_back(i);
  for (const auto& [j, members] : by_j) {
    const SegmentSet Ej = minigraph_set(fam, members, radius);
    GraphCover g;
    try {
      g = cover_by_single_graph(Ej, a, a * a, Angle(fam.v(j)), cfg);
    } catch (const EmptyResult&) {
      continue;
    }
    for (const auto& q : g.graph_points.points) refined[cell_key(Ej.segments()[q.segment], q)] = j;
  }
  RefinedBucket out;
  for (const auto& q : F.cover.graph_points.points) {
    const Segment& s = F.set.segments()[q.segment];
    const auto it = refined.find(cell_key(s, q));
    if (it == refined.end()) continue;
    out.cells.points.push_back(q);
    out.graph_of.push_back(it->second);
    out.seg_of.push_back(s);
  }
  return out;
}

// Greedy heaviest-first centres among cloud points, pairwise >= sep apart.
// Masses equal to 1e-12 relative count as ties; ties go to the lower index.
inline std::vector<HeavyBall> heavy_balls(const WeightedCloud& c, int count, double radius, double threshold, double sep) {
  std::vector<double> mass(c.size(), 0.0);
  parallel_for(c.size(), [&](std::size_t i) {
    double m = 0.0;
    for (const auto& q : c.points)
      if ((q.p - c.points[i].p).norm() <= radius) m += q.weight;
    mass[i] = m;
  });
  std::vector<HeavyBall> out;
  std::vector<char> used(c.size(), 0);
  while (static_cast<int>(out.size()) < count) {
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (mass[i] < threshold) continue;
      bool ok = true;
      for (const auto& b : out)
        if ((c.points[i].p - b.center).norm() < sep) { ok = false; break; }
      if (!ok) continue;
      if (best < 0 || mass[i] > mass[best] * (1 + 1e-12)) best = static_cast<std::ptrdiff_t>(i);
    }
    if (best < 0) break;
    out.push_back({c.points[best].p, mass[best], -1, {}});
  }
  return out;
}

// Dominant refined graph inside the ball; its line passes through the
// centroid of those cells along v_j.
inline void attach_dominant_graph(HeavyBall& b, const RefinedBucket& R, const MinigraphFamily& fam, double radius,
                                  double threshold) {
  std::map<int, double> m;
  for (std::size_t i = 0; i < R.cells.size(); ++i)
    if ((R.cells.points[i].p - b.center).norm() <= radius) m[R.graph_of[i]] += R.cells.points[i].weight;
  int best = -1;
  double bm = 0.0;
  for (const auto& [j, v] : m)
    if (v > bm * (1 + 1e-12)) { bm = v; best = j; }
  if (best < 0 || bm < threshold) throw WitnessFailed("dominant_graph", "no refined graph carries enough mass in a heavy ball");
  Vec2 centroid;
  double w = 0.0;
  for (std::size_t i = 0; i < R.cells.size(); ++i)
    if (R.graph_of[i] == best && (R.cells.points[i].p - b.center).norm() <= radius) {
      centroid = centroid + R.cells.points[i].p * R.cells.points[i].weight;
      w += R.cells.points[i].weight;
    }
  centroid = centroid * (1.0 / w);
  b.dominant = best;
  b.line = AffineLine::through(centroid, fam.v(best) + kPi / 2);
}

inline void collect_G(const RefinedBucket& R, const HeavyBall& b, double radius, const Tube& avoid, WeightedCloud& G,
                      std::vector<Segment>& pieces) {
  std::vector<std::pair<CloudPoint, Segment>> cells;
  for (std::size_t i = 0; i < R.cells.size(); ++i) {
    const auto& q = R.cells.points[i];
    if (R.graph_of[i] == b.dominant && (q.p - b.center).norm() <= radius && !avoid.contains(q.p))
      cells.push_back({q, R.seg_of[i]});
  }
  std::sort(cells.begin(), cells.end(), [](const auto& x, const auto& y) { return x.first.arclength < y.first.arclength; });
  for (const auto& [q, s] : cells) {
    G.points.push_back(q);
    // Adjacent cells of one segment merge into one piece.
    const Vec2 a = s.at(q.s0), e = s.at(q.s1);
    if (!pieces.empty() && (pieces.back().b() - a).norm() <= 1e-12 &&
        std::abs(pieces.back().unit_tangent().cross(s.unit_tangent())) < 1e-12)
      pieces.back() = Segment(pieces.back().a(), e);
    else
      pieces.emplace_back(a, e);
  }
}

}  // namespace detail

inline Witness build_witness(const MinigraphFamily& fam, const SegmentSet& E, int k, int l, const AnalysisConfig& cfg) {
  const double a = fam.alpha, ak = std::pow(a, fam.kappa);
  const double threshold = cfg.mass_multiplier * a * a * a;
  const int C_sep = static_cast<int>(std::lround(cfg.C_sep));
  if (circular_distance(k, l, fam.M3) < C_sep) throw WitnessFailed("bucket_separation", "|k - l| < C_sep");
  if (fam.F_mass[k] < ak * ak || fam.F_mass[l] < ak * ak)
    throw WitnessFailed("bucket_mass", "a coarse bucket carries less than alpha^(2 kappa)");
  AnalysisConfig c = cfg;
  c.sample_step = cfg.step_for(E);
  const double radius = E.bounding_radius();

  const auto Rk = detail::refine_bucket(fam, k, radius, c);
  const auto Rl = detail::refine_bucket(fam, l, radius, c);
  if (Rk.cells.total_mass() < threshold || Rl.cells.total_mass() < threshold)
    throw WitnessFailed("graph_cover", "refined coarse bucket lost its mass");

  Witness w;
  w.k = k;
  w.l = l;
  w.alpha = a;
  w.mass_threshold = threshold;
  w.inner_halfwidth = cfg.witness_C * a;
  w.outer_halfwidth = std::sqrt(a);
  const double sep = ak * ak / cfg.witness_C;
  w.separation = sep;
  w.balls_k = detail::heavy_balls(Rk.cells, 2, a, a * a, sep);
  w.balls_l = detail::heavy_balls(Rl.cells, 3, a, a * a, sep);
  if (w.balls_k.size() < 2 || w.balls_l.size() < 3)
    throw WitnessFailed("heavy_balls", "not enough separated heavy balls");
  for (auto& b : w.balls_k) detail::attach_dominant_graph(b, Rk, fam, a, threshold);
  for (auto& b : w.balls_l) detail::attach_dominant_graph(b, Rl, fam, a, threshold);

  // A tube of halfwidth alpha^{1/2} meets B(y, alpha) iff dist(y, line) <= alpha^{1/2} + alpha.
  const double reach = w.outer_halfwidth + a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      w.tube_k_meets_ball_l[i][j] = w.balls_k[i].line.distance(w.balls_l[j].center) <= reach;
      w.tube_l_meets_ball_k[j][i] = w.balls_l[j].line.distance(w.balls_k[i].center) <= reach;
    }
  for (int i = 0; i < 2; ++i) {
    int row = 0;
    for (int j = 0; j < 3; ++j) row += w.tube_k_meets_ball_l[i][j];
    if (row > 1) throw WitnessFailed("pigeonhole", "a tube of bucket k meets two balls of bucket l");
  }
  for (int j = 0; j < 3; ++j) {
    int col = 0;
    for (int i = 0; i < 2; ++i) col += w.tube_l_meets_ball_k[j][i];
    if (col > 1) throw WitnessFailed("pigeonhole", "a tube of bucket l meets both balls of bucket k");
  }
  for (int i = 0; i < 2 && w.i0 < 0; ++i)
    for (int j = 0; j < 3; ++j)
      if (!w.tube_k_meets_ball_l[i][j] && !w.tube_l_meets_ball_k[j][i]) {
        w.i0 = i;
        w.j0 = j;
        break;
      }
  if (w.i0 < 0) throw WitnessFailed("pigeonhole", "no tube-avoiding ball pair");

  w.line_k = w.balls_k[w.i0].line;
  w.line_l = w.balls_l[w.j0].line;
  detail::collect_G(Rk, w.balls_k[w.i0], a, w.outer_l(), w.G_k, w.G_k_pieces);
  detail::collect_G(Rl, w.balls_l[w.j0], a, w.outer_k(), w.G_l, w.G_l_pieces);
  if (w.G_k.total_mass() < threshold || w.G_l.total_mass() < threshold)
    throw WitnessFailed("witness_sets", "a witness set is lighter than the mass threshold");

  // Membership re-check, point by point.
  for (const auto& q : w.G_k.points)
    if (!w.inner_k().contains(q.p) || w.outer_l().contains(q.p) || (q.p - w.balls_k[w.i0].center).norm() > a)
      throw WitnessFailed("membership", "a G_k point violates the tube conditions");
  for (const auto& q : w.G_l.points)
    if (!w.inner_l().contains(q.p) || w.outer_k().contains(q.p) || (q.p - w.balls_l[w.j0].center).norm() > a)
      throw WitnessFailed("membership", "a G_l point violates the tube conditions");
  return w;
}

// Measure of lines meeting both witness sets, by the pair-Jacobian formula.
inline double defect_certificate(const Witness& w) {
  if (w.G_k_pieces.empty() || w.G_l_pieces.empty()) return 0.0;
  return pair_line_measure_formula(CurveWithTangents(w.G_k_pieces), CurveWithTangents(w.G_l_pieces)).value;
}

struct AnalysisReport {
  enum class Outcome { Cover, Witness } outcome = Outcome::Cover;
  double eps = 0.0;
  double alpha = 0.0;
  int M2 = 0, M3 = 0;
  std::size_t minigraph_count = 0;
  CaseSplit split;
  // Cover outcome
  std::optional<GraphCover> cover;
  double cover_alpha = 0.0;
  double window_mass = 0.0;
  double uncovered_mass = 0.0;
  double discretization_slack = 0.0;
  // Witness outcome
  std::optional<Witness> witness;
  double certificate = 0.0;
  double defect_measured = 0.0;
  FavardReport favard;
  AnalysisConfig config;
};

inline AnalysisReport analyze(const SegmentSet& E, double eps, const AnalysisConfig& cfg) {
  cfg.validate();
  if (!(eps > 0)) throw ValidationError("analyze", "eps must be positive");
  AnalysisReport rep;
  rep.config = cfg;
  rep.eps = eps;
  rep.alpha = cfg.effective_alpha(eps);
  if (!(rep.alpha > 0 && rep.alpha < cfg.alpha0))
    throw ValidationError("analyze", "alpha must lie in (0, alpha0)");
  rep.favard = favard_report(E, cfg.quad);
  if (E.empty()) {
    rep.split.kind = CaseSplit::Kind::Case1;
    return rep;
  }
  AnalysisConfig c = cfg;
  c.sample_step = cfg.step_for(E);
  const auto fam = minigraph_decompose(E.polylines(), rep.alpha, cfg.kappa);
  rep.M2 = fam.M2;
  rep.M3 = fam.M3;
  rep.minigraph_count = fam.minigraphs.size();
  rep.split = case_split(fam, eps, cfg);
  if (rep.split.kind == CaseSplit::Kind::Case1) {
    rep.outcome = AnalysisReport::Outcome::Cover;
    const int C_sep = static_cast<int>(std::lround(cfg.C_sep));
    const auto wb = window_buckets(rep.split.window, C_sep, fam.M3);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < fam.minigraphs.size(); ++i)
      if (std::find(wb.begin(), wb.end(), fam.minigraphs[i].coarse) != wb.end()) idx.push_back(i);
    if (idx.empty()) return rep;
    const auto bc = cover_minigraphs(fam, idx, rep.alpha, eps, E.bounding_radius(), c);
    rep.cover = bc.cover;
    rep.cover_alpha = bc.alpha_used;
    rep.window_mass = bc.set.total_length();
    rep.uncovered_mass = rep.split.complement_mass + bc.cover.removed_mass();
    rep.discretization_slack = 2 * c.sample_step * static_cast<double>(idx.size());
  } else {
    rep.outcome = AnalysisReport::Outcome::Witness;
    Witness w = build_witness(fam, E, rep.split.k, rep.split.l, c);
    rep.certificate = defect_certificate(w);
    w.eta_lower = rep.certificate;
    rep.witness = std::move(w);
    rep.defect_measured = favard_defect(E, cfg.quad).value;
  }
  return rep;
}

}  // namespace favard
