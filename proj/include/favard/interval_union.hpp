// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace favard {

inline constexpr double kPi = std::numbers::pi;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

enum class Domain { Line, AngleCircle };

// Canonical union of closed intervals: sorted, pairwise disjoint, touching
// intervals merged. On the angle circle every interval lies in [0, pi]; an
// arc crossing pi is stored as the split pair [a, pi] and [0, b].
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(Domain d) : domain_(d) {}

  static IntervalUnion line(std::vector<Interval> parts) {
    IntervalUnion u(Domain::Line);
    u.parts_ = std::move(parts);
    u.canonicalize();
    return u;
  }

  // Arc of the angle circle starting at `start` (any real) with the given
  // length. Lengths >= pi give the full circle.
  static IntervalUnion arc(double start, double len) {
    IntervalUnion u(Domain::AngleCircle);
    u.add_arc(start, len);
    u.canonicalize();
    return u;
  }

  static IntervalUnion full_circle() { return arc(0.0, kPi); }

  Domain domain() const { return domain_; }
  const std::vector<Interval>& intervals() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  double measure() const {
    double m = 0.0;
    for (const auto& p : parts_) m += p.hi - p.lo;
    return m;
  }

  bool contains(double v) const {
    if (domain_ == Domain::AngleCircle) v = wrap(v);
    auto it = std::upper_bound(parts_.begin(), parts_.end(), v,
                               [](double x, const Interval& p) { return x < p.lo; });
    if (it == parts_.begin()) return false;
    return v <= std::prev(it)->hi;
  }

  void add(Interval iv) {
    if (domain_ == Domain::AngleCircle) {
      add_arc(iv.lo, iv.hi - iv.lo);
    } else if (iv.hi >= iv.lo) {
      parts_.push_back(iv);
    }
    canonicalize();
  }

  IntervalUnion unite(const IntervalUnion& o) const {
    IntervalUnion r(domain_);
    r.parts_ = parts_;
    r.parts_.insert(r.parts_.end(), o.parts_.begin(), o.parts_.end());
    r.canonicalize();
    return r;
  }

  IntervalUnion intersect(const IntervalUnion& o) const {
    IntervalUnion r(domain_);
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < o.parts_.size()) {
      const double lo = std::max(parts_[i].lo, o.parts_[j].lo);
      const double hi = std::min(parts_[i].hi, o.parts_[j].hi);
      if (lo <= hi) r.parts_.push_back({lo, hi});
      if (parts_[i].hi < o.parts_[j].hi) ++i; else ++j;
    }
    r.canonicalize();
    return r;
  }

  // Complement relative to `within` (closure of the set difference).
  IntervalUnion subtract_from(const IntervalUnion& within) const {
    IntervalUnion r(within.domain_);
    for (const auto& w : within.parts_) {
      double cur = w.lo;
      for (const auto& p : parts_) {
        if (p.hi < cur) continue;
        if (p.lo > w.hi) break;
        if (p.lo > cur) r.parts_.push_back({cur, p.lo});
        cur = std::max(cur, p.hi);
      }
      if (cur < w.hi) r.parts_.push_back({cur, w.hi});
    }
    r.canonicalize();
    return r;
  }

  // Re-running canonicalization is a no-op on an already canonical union.
  void canonicalize() {
    std::vector<Interval> in;
    in.reserve(parts_.size());
    for (auto p : parts_) {
      if (!(p.hi >= p.lo)) continue;
      if (domain_ == Domain::AngleCircle) {
        p.lo = std::clamp(p.lo, 0.0, kPi);
        p.hi = std::clamp(p.hi, 0.0, kPi);
      }
      in.push_back(p);
    }
    std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) {
      return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    parts_.clear();
    for (const auto& p : in) {
      if (!parts_.empty() && p.lo <= parts_.back().hi) {
        parts_.back().hi = std::max(parts_.back().hi, p.hi);
      } else {
        parts_.push_back(p);
      }
    }
  }

  static double wrap(double a) {
    double r = std::fmod(a, kPi);
    if (r < 0) r += kPi;
    if (r >= kPi) r = 0.0;
    return r;
  }

 private:
  void add_arc(double start, double len) {
    if (!(len >= 0)) return;
    if (len >= kPi) {
      parts_.push_back({0.0, kPi});
      return;
    }
    const double a = wrap(start);
    const double b = a + len;
    if (b <= kPi) {
      parts_.push_back({a, b});
    } else {
      parts_.push_back({a, kPi});
      parts_.push_back({0.0, b - kPi});
    }
  }

  Domain domain_ = Domain::Line;
  std::vector<Interval> parts_;
};

inline IntervalUnion interval_union(std::vector<Interval> intervals) {
  return IntervalUnion::line(std::move(intervals));
}

}  // namespace favard
