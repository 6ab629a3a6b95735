#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "radepi/rational.hpp"

namespace radepi {

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Ground set X: all of R^n, a box with optional (= unbounded) rational
/// bounds, or an explicit finite point set.
class Domain {
 public:
  enum class Kind { all, box, finite };

  static Domain all_space(int dim) {
    Domain d;
    d.kind_ = Kind::all;
    d.dim_ = dim;
    return d;
  }

  static Domain box(std::vector<std::optional<Rational>> lower,
                    std::vector<std::optional<Rational>> upper) {
    if (lower.size() != upper.size()) throw DomainError("box bound sizes differ");
    for (size_t i = 0; i < lower.size(); ++i)
      if (lower[i] && upper[i] && *lower[i] > *upper[i])
        throw DomainError("box has lower > upper in coordinate " + std::to_string(i));
    Domain d;
    d.kind_ = Kind::box;
    d.dim_ = static_cast<int>(lower.size());
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    return d;
  }

  static Domain finite(std::vector<RationalVector> points) {
    if (points.empty()) throw DomainError("finite domain needs at least one point");
    size_t dim = points[0].size();
    std::vector<RationalVector> dedup;
    for (auto& p : points) {
      if (p.size() != dim) throw DomainError("finite domain points have mixed dimensions");
      bool seen = false;
      for (const auto& q : dedup)
        if (q == p) {
          seen = true;
          break;
        }
      if (!seen) dedup.push_back(std::move(p));
    }
    Domain d;
    d.kind_ = Kind::finite;
    d.dim_ = static_cast<int>(dim);
    d.points_ = std::move(dedup);
    return d;
  }

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  const std::vector<RationalVector>& points() const { return points_; }
  const std::vector<std::optional<Rational>>& lower() const { return lower_; }
  const std::vector<std::optional<Rational>>& upper() const { return upper_; }

  bool contains(std::span<const Rational> x) const {
    switch (kind_) {
      case Kind::all:
        return true;
      case Kind::box:
        for (size_t i = 0; i < x.size(); ++i) {
          if (lower_[i] && x[i] < *lower_[i]) return false;
          if (upper_[i] && x[i] > *upper_[i]) return false;
        }
        return true;
      case Kind::finite:
        for (const auto& p : points_) {
          bool eq = true;
          for (size_t i = 0; i < x.size(); ++i)
            if (p[i] != x[i]) {
              eq = false;
              break;
            }
          if (eq) return true;
        }
        return false;
    }
    return false;
  }

  bool contains(std::span<const double> x, double tol = 0.0) const {
    switch (kind_) {
      case Kind::all:
        return true;
      case Kind::box:
        for (size_t i = 0; i < x.size(); ++i) {
          if (lower_[i] && x[i] < to_double(*lower_[i]) - tol) return false;
          if (upper_[i] && x[i] > to_double(*upper_[i]) + tol) return false;
        }
        return true;
      case Kind::finite:
        for (const auto& p : points_) {
          bool eq = true;
          for (size_t i = 0; i < x.size(); ++i)
            if (to_double(p[i]) != x[i]) {
              eq = false;
              break;
            }
          if (eq) return true;
        }
        return false;
    }
    return false;
  }

  /// The set {t > 0 : xbar + t d in X} along a ray.
  struct RaySection {
    enum class Kind { empty, interval, finite } kind = Kind::empty;
    // interval: [lo, hi] intersected with (0, inf); lo == 0 means open at 0.
    Rational lo{};
    std::optional<Rational> hi;  // nullopt = unbounded
    std::vector<Rational> ts;    // finite kind, sorted ascending, all > 0
    bool unbounded() const { return kind == Kind::interval && !hi; }
  };

  RaySection ray_section(std::span<const Rational> xbar, std::span<const Rational> d) const {
    RaySection sec;
    switch (kind_) {
      case Kind::all: {
        sec.kind = RaySection::Kind::interval;
        sec.lo = 0;
        return sec;
      }
      case Kind::box: {
        Rational lo = 0;
        std::optional<Rational> hi;
        for (size_t i = 0; i < d.size(); ++i) {
          if (d[i] == 0) {
            if ((lower_[i] && xbar[i] < *lower_[i]) || (upper_[i] && xbar[i] > *upper_[i]))
              return sec;  // ray never enters the box
            continue;
          }
          // lower_[i] <= xbar[i] + t d[i] <= upper_[i]
          if (d[i] > 0) {
            if (lower_[i]) lo = std::max(lo, Rational((*lower_[i] - xbar[i]) / d[i]));
            if (upper_[i]) {
              Rational bound = (*upper_[i] - xbar[i]) / d[i];
              hi = hi ? std::min(*hi, bound) : bound;
            }
          } else {
            if (upper_[i]) lo = std::max(lo, Rational((*upper_[i] - xbar[i]) / d[i]));
            if (lower_[i]) {
              Rational bound = (*lower_[i] - xbar[i]) / d[i];
              hi = hi ? std::min(*hi, bound) : bound;
            }
          }
        }
        if (hi && (*hi < lo || *hi <= 0)) return sec;
        sec.kind = RaySection::Kind::interval;
        sec.lo = lo;
        sec.hi = hi;
        return sec;
      }
      case Kind::finite: {
        std::vector<Rational> ts;
        for (const auto& p : points_) {
          // p = xbar + t d for a single t > 0?
          std::optional<Rational> t;
          bool ok = true;
          for (size_t i = 0; i < d.size(); ++i) {
            if (d[i] == 0) {
              if (p[i] != xbar[i]) {
                ok = false;
                break;
              }
              continue;
            }
            Rational ti = (p[i] - xbar[i]) / d[i];
            if (!t)
              t = ti;
            else if (*t != ti) {
              ok = false;
              break;
            }
          }
          if (ok && t && *t > 0) ts.push_back(*t);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        if (ts.empty()) return sec;
        sec.kind = RaySection::Kind::finite;
        sec.ts = std::move(ts);
        return sec;
      }
    }
    return sec;
  }

 private:
  Kind kind_ = Kind::all;
  int dim_ = 0;
  std::vector<std::optional<Rational>> lower_, upper_;
  std::vector<RationalVector> points_;
};

}  // namespace radepi
