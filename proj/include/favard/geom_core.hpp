// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "favard/errors.hpp"
#include "favard/interval_union.hpp"

namespace favard {

inline constexpr double geom_eps = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Direction angle modulo pi, normalized to [0, pi).
class Angle {
 public:
  Angle() = default;
  explicit Angle(double theta) : theta_(IntervalUnion::wrap(theta)) {}
  double value() const { return theta_; }
  operator double() const { return theta_; }

 private:
  double theta_ = 0.0;
};

// Unsigned distance between two line directions on the circle of length pi.
inline double angle_distance(double a, double b) {
  const double d = IntervalUnion::wrap(a - b);
  return std::min(d, kPi - d);
}

inline double project_point(Vec2 p, double theta) {
  return p.x * std::cos(theta) + p.y * std::sin(theta);
}

class Segment {
 public:
  Segment() = default;
  Segment(Vec2 a, Vec2 b) : a_(a), b_(b) {
    len_ = (b - a).norm();
    if (!(len_ > geom_eps)) throw ValidationError("segment has zero length");
  }

  Vec2 a() const { return a_; }
  Vec2 b() const { return b_; }
  double length() const { return len_; }
  Vec2 unit_tangent() const { return (b_ - a_) * (1.0 / len_); }
  Angle direction_angle() const { return Angle(std::atan2(b_.y - a_.y, b_.x - a_.x)); }
  Vec2 at(double s) const { return a_ + (b_ - a_) * s; }
  Vec2 midpoint() const { return at(0.5); }

  double distance_to(Vec2 p) const {
    const Vec2 d = b_ - a_;
    const double s = std::clamp((p - a_).dot(d) / (len_ * len_), 0.0, 1.0);
    return (p - at(s)).norm();
  }

 private:
  Vec2 a_, b_;
  double len_ = 0.0;
};

inline Interval project_segment(const Segment& s, double theta) {
  const double pa = project_point(s.a(), theta);
  const double pb = project_point(s.b(), theta);
  return {std::min(pa, pb), std::max(pa, pb)};
}

class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> v) : vertices_(std::move(v)) {
    if (vertices_.size() < 2) throw ValidationError("polyline needs at least 2 vertices");
    edges_.reserve(vertices_.size() - 1);
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      if ((vertices_[i + 1] - vertices_[i]).norm() <= geom_eps)
        throw ValidationError("polyline has repeated consecutive vertices");
      edges_.emplace_back(vertices_[i], vertices_[i + 1]);
      length_ += edges_.back().length();
    }
  }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Segment>& edges() const { return edges_; }
  double length() const { return length_; }

 private:
  std::vector<Vec2> vertices_;
  std::vector<Segment> edges_;
  double length_ = 0.0;
};

inline double segment_distance(const Segment& s, const Segment& t) {
  const Vec2 r = s.b() - s.a();
  const Vec2 q = t.b() - t.a();
  const double denom = r.cross(q);
  if (std::abs(denom) > 0) {
    const double u = (t.a() - s.a()).cross(q) / denom;
    const double v = (t.a() - s.a()).cross(r) / denom;
    if (u >= 0 && u <= 1 && v >= 0 && v <= 1) return 0.0;
  }
  return std::min({s.distance_to(t.a()), s.distance_to(t.b()), t.distance_to(s.a()),
                   t.distance_to(s.b())});
}

// Positive-length overlap test for a pair of segments.
inline bool segments_overlap(const Segment& s, const Segment& t) {
  const Vec2 u = s.unit_tangent();
  if (std::abs(u.cross(t.unit_tangent())) > 1e-9) return false;
  const Vec2 n{-u.y, u.x};
  if (std::abs(n.dot(t.a() - s.a())) > geom_eps || std::abs(n.dot(t.b() - s.a())) > geom_eps)
    return false;
  const double t0 = u.dot(t.a() - s.a());
  const double t1 = u.dot(t.b() - s.a());
  const double lo = std::max(0.0, std::min(t0, t1));
  const double hi = std::min(s.length(), std::max(t0, t1));
  return hi - lo > geom_eps;
}

// A finite union of segments grouped into polylines. Loose segments are
// stored as two-vertex polylines; `segments()` lists every edge in order.
class SegmentSet {
 public:
  SegmentSet() = default;

  SegmentSet(std::vector<Polyline> polylines, double bounding_radius = 0.0)
      : polylines_(std::move(polylines)) {
    for (std::size_t p = 0; p < polylines_.size(); ++p)
      for (const auto& e : polylines_[p].edges()) {
        segments_.push_back(e);
        owner_.push_back(p);
      }
    double rmax = 0.0;
    for (const auto& s : segments_) rmax = std::max({rmax, s.a().norm(), s.b().norm()});
    radius_ = bounding_radius > 0 ? bounding_radius : rmax;
    if (rmax > radius_ * (1 + 1e-12) + geom_eps)
      throw ValidationError("endpoint outside bounding_radius");
    validate_overlaps();
  }

  static SegmentSet from_segments(const std::vector<Segment>& segs, double bounding_radius = 0.0) {
    std::vector<Polyline> p;
    p.reserve(segs.size());
    for (const auto& s : segs) p.emplace_back(std::vector<Vec2>{s.a(), s.b()});
    return SegmentSet(std::move(p), bounding_radius);
  }

  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<Polyline>& polylines() const { return polylines_; }
  std::size_t polyline_of(std::size_t seg) const { return owner_[seg]; }
  double bounding_radius() const { return radius_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }

  double total_length() const {
    double l = 0.0;
    for (const auto& s : segments_) l += s.length();
    return l;
  }

 private:
  void validate_overlaps() const {
    for (std::size_t i = 0; i < segments_.size(); ++i)
      for (std::size_t j = i + 1; j < segments_.size(); ++j)
        if (segments_overlap(segments_[i], segments_[j]))
          throw ValidationError("segments " + std::to_string(i) + " and " + std::to_string(j) +
                                " overlap in a positive-length piece");
  }

  std::vector<Polyline> polylines_;
  std::vector<Segment> segments_;
  std::vector<std::size_t> owner_;
  double radius_ = 0.0;
};

// The line pi_theta^{-1}{t}.
struct AffineLine {
  Angle theta;
  double t = 0.0;

  static AffineLine through(Vec2 x, double theta) {
    Angle a(theta);
    return {a, project_point(x, a)};
  }
  Vec2 normal() const { return unit_vector(theta); }
  Vec2 direction() const { return {-std::sin(theta.value()), std::cos(theta.value())}; }
  double signed_distance(Vec2 p) const { return project_point(p, theta) - t; }
  double distance(Vec2 p) const { return std::abs(signed_distance(p)); }
};

struct Tube {
  AffineLine center;
  double w = 0.0;

  bool contains(Vec2 p) const { return center.distance(p) <= w; }
  bool meets_ball(Vec2 c, double r) const { return center.distance(c) <= w + r; }
};

// Parameter range s in [0,1] of the part of `s` inside the closed strip
// |pi_theta(p) - t| <= w (empty if hi < lo).
inline Interval clip_segment_to_strip(const Segment& s, const AffineLine& l, double w) {
  const double fa = l.signed_distance(s.a());
  const double fb = l.signed_distance(s.b());
  const double d = fb - fa;
  if (std::abs(d) < 1e-300) {
    return std::abs(fa) <= w ? Interval{0.0, 1.0} : Interval{1.0, 0.0};
  }
  double s0 = (-w - fa) / d, s1 = (w - fa) / d;
  if (s0 > s1) std::swap(s0, s1);
  return {std::max(0.0, s0), std::min(1.0, s1)};
}

inline double length_in_tube(const SegmentSet& E, const Tube& T) {
  double m = 0.0;
  for (const auto& s : E.segments()) {
    const Interval iv = clip_segment_to_strip(s, T.center, T.w);
    if (iv.hi > iv.lo) m += (iv.hi - iv.lo) * s.length();
  }
  return m;
}

struct LineIntersection {
  int count = 0;
  std::vector<Vec2> points;
};

inline LineIntersection line_set_intersection(const SegmentSet& E, const AffineLine& l) {
  std::vector<Vec2> pts;
  for (const auto& s : E.segments()) {
    const double fa = l.signed_distance(s.a());
    const double fb = l.signed_distance(s.b());
    if (std::abs(fa) <= geom_eps && std::abs(fb) <= geom_eps)
      throw CollinearOverlap("line contains a segment; perturb theta");
    if ((fa <= 0 && fb >= 0) || (fa >= 0 && fb <= 0)) {
      const double u = fa / (fa - fb);
      pts.push_back(s.at(u));
    }
  }
  std::vector<Vec2> uniq;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : uniq)
      if ((p - q).norm() <= 1e3 * geom_eps) { dup = true; break; }
    if (!dup) uniq.push_back(p);
  }
  std::sort(uniq.begin(), uniq.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return {static_cast<int>(uniq.size()), std::move(uniq)};
}

// Angles theta such that the line through x with normal angle theta meets S.
inline IntervalUnion subtended_directions(Vec2 x, const Segment& S) {
  if (S.distance_to(x) <= geom_eps) return IntervalUnion::full_circle();
  const Vec2 da = S.a() - x, db = S.b() - x;
  const double pa = std::atan2(da.y, da.x);
  const double span = std::atan2(da.cross(db), da.dot(db));  // signed, in (-pi, pi)
  const double start = span >= 0 ? pa : pa + span;
  return IntervalUnion::arc(start + kPi / 2, std::abs(span));
}

// Rigid motion p -> R(phi) p + shift.
struct RigidMotion {
  double phi = 0.0;
  Vec2 shift;

  Vec2 apply(Vec2 p) const {
    const double c = std::cos(phi), s = std::sin(phi);
    return {c * p.x - s * p.y + shift.x, s * p.x + c * p.y + shift.y};
  }
  AffineLine apply(const AffineLine& l) const {
    const double th = l.theta.value() + phi;
    const Angle a(th);
    // Normalizing th into [0, pi) may flip the normal.
    const double sign = unit_vector(th).dot(unit_vector(a.value())) > 0 ? 1.0 : -1.0;
    return {a, sign * (l.t + unit_vector(th).dot(shift))};
  }
  SegmentSet apply(const SegmentSet& E) const {
    std::vector<Polyline> out;
    double r = 0.0;
    for (const auto& pl : E.polylines()) {
      std::vector<Vec2> v;
      for (auto p : pl.vertices()) {
        v.push_back(apply(p));
        r = std::max(r, v.back().norm());
      }
      out.emplace_back(std::move(v));
    }
    return SegmentSet(std::move(out), r);
  }
};

}  // namespace favard
