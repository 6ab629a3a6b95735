#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "radepi/rational.hpp"

namespace radepi {

enum class ExprKind { constant, variable, affine, norm, abs_value, scale, sum, min, max };
enum class NormKind { euclidean, max };

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ExprError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree over the function class
///   constants, variables, affine forms <a,x>+alpha, norms ||x-b|| (Euclidean
///   or max), absolute values, scalar multiples, sums, finite min and max.
/// Rational data keeps exact duplicates in double for the sampling hot path.
class Expr {
 public:
  ExprKind kind;

  Rational value{};  // constant
  int index = -1;    // variable

  RationalVector coeffs;  // affine
  Rational offset{};

  RationalVector center;  // norm
  NormKind norm_kind = NormKind::euclidean;

  Rational factor{};  // scale

  std::vector<ExprPtr> args;  // abs_value/scale: 1, sum/min/max: >= 1

  double value_d = 0, offset_d = 0, factor_d = 0;
  std::vector<double> coeffs_d, center_d;

  static ExprPtr constant(Rational v) {
    auto e = make(ExprKind::constant);
    e->value = std::move(v);
    e->value_d = to_double(e->value);
    return e;
  }

  static ExprPtr variable(int idx) {
    if (idx < 0) throw ExprError("variable index must be nonnegative");
    auto e = make(ExprKind::variable);
    e->index = idx;
    return e;
  }

  static ExprPtr affine(RationalVector coeffs, Rational off) {
    auto e = make(ExprKind::affine);
    e->coeffs = std::move(coeffs);
    e->offset = std::move(off);
    e->coeffs_d = to_double_vector(e->coeffs);
    e->offset_d = to_double(e->offset);
    return e;
  }

  static ExprPtr norm(RationalVector center, NormKind k) {
    auto e = make(ExprKind::norm);
    e->center = std::move(center);
    e->norm_kind = k;
    e->center_d = to_double_vector(e->center);
    return e;
  }

  static ExprPtr abs_of(ExprPtr arg) {
    auto e = make(ExprKind::abs_value);
    e->args = {std::move(arg)};
    return e;
  }

  static ExprPtr scaled(Rational f, ExprPtr arg) {
    auto e = make(ExprKind::scale);
    e->factor = std::move(f);
    e->factor_d = to_double(e->factor);
    e->args = {std::move(arg)};
    return e;
  }

  static ExprPtr sum_of(std::vector<ExprPtr> args) {
    if (args.empty()) throw ExprError("sum needs at least one term");
    auto e = make(ExprKind::sum);
    e->args = std::move(args);
    return e;
  }

  static ExprPtr min_of(std::vector<ExprPtr> args) {
    if (args.empty()) throw ExprError("min needs at least one argument");
    auto e = make(ExprKind::min);
    e->args = std::move(args);
    return e;
  }

  static ExprPtr max_of(std::vector<ExprPtr> args) {
    if (args.empty()) throw ExprError("max needs at least one argument");
    auto e = make(ExprKind::max);
    e->args = std::move(args);
    return e;
  }

 private:
  explicit Expr(ExprKind k) : kind(k) {}
  static std::shared_ptr<Expr> make(ExprKind k) {
    return std::shared_ptr<Expr>(new Expr(k));
  }
};

/// Throws unless every node is consistent with dimension n.
inline void check_dimension(const Expr& e, int n) {
  switch (e.kind) {
    case ExprKind::constant:
      return;
    case ExprKind::variable:
      if (e.index >= n)
        throw DimensionError("variable index " + std::to_string(e.index) +
                             " out of range for dimension " + std::to_string(n));
      return;
    case ExprKind::affine:
      if (static_cast<int>(e.coeffs.size()) != n)
        throw DimensionError("affine coefficient count " + std::to_string(e.coeffs.size()) +
                             " does not match dimension " + std::to_string(n));
      return;
    case ExprKind::norm:
      if (static_cast<int>(e.center.size()) != n)
        throw DimensionError("norm center size " + std::to_string(e.center.size()) +
                             " does not match dimension " + std::to_string(n));
      return;
    default:
      for (const auto& a : e.args) check_dimension(*a, n);
      return;
  }
}

inline double eval(const Expr& e, std::span<const double> x) {
  switch (e.kind) {
    case ExprKind::constant:
      return e.value_d;
    case ExprKind::variable:
      return x[static_cast<size_t>(e.index)];
    case ExprKind::affine: {
      double s = e.offset_d;
      for (size_t i = 0; i < e.coeffs_d.size(); ++i) s += e.coeffs_d[i] * x[i];
      return s;
    }
    case ExprKind::norm: {
      if (e.norm_kind == NormKind::euclidean) {
        double ss = 0;
        for (size_t i = 0; i < e.center_d.size(); ++i) {
          double r = x[i] - e.center_d[i];
          ss += r * r;
        }
        return std::sqrt(ss);
      }
      double m = 0;
      for (size_t i = 0; i < e.center_d.size(); ++i)
        m = std::max(m, std::fabs(x[i] - e.center_d[i]));
      return m;
    }
    case ExprKind::abs_value:
      return std::fabs(eval(*e.args[0], x));
    case ExprKind::scale:
      return e.factor_d * eval(*e.args[0], x);
    case ExprKind::sum: {
      double s = 0;
      for (const auto& a : e.args) s += eval(*a, x);
      return s;
    }
    case ExprKind::min: {
      double m = eval(*e.args[0], x);
      for (size_t i = 1; i < e.args.size(); ++i) m = std::min(m, eval(*e.args[i], x));
      return m;
    }
    case ExprKind::max: {
      double m = eval(*e.args[0], x);
      for (size_t i = 1; i < e.args.size(); ++i) m = std::max(m, eval(*e.args[i], x));
      return m;
    }
  }
  return 0;  // unreachable
}

/// Exact evaluation at a rational point. The result stays rational except
/// through Euclidean norm nodes whose squared norm is not a perfect square.
inline Scalar eval_scalar(const Expr& e, std::span<const Rational> x) {
  switch (e.kind) {
    case ExprKind::constant:
      return Scalar::of(e.value);
    case ExprKind::variable:
      return Scalar::of(x[static_cast<size_t>(e.index)]);
    case ExprKind::affine: {
      Rational s = e.offset;
      for (size_t i = 0; i < e.coeffs.size(); ++i) s += e.coeffs[i] * x[i];
      return Scalar::of(std::move(s));
    }
    case ExprKind::norm: {
      if (e.norm_kind == NormKind::euclidean) {
        Rational ss = 0;
        for (size_t i = 0; i < e.center.size(); ++i) {
          Rational r = x[i] - e.center[i];
          ss += r * r;
        }
        if (auto root = exact_sqrt(ss)) return Scalar::of(std::move(*root));
        return Scalar::of(std::sqrt(to_double(ss)));
      }
      Rational m = 0;
      for (size_t i = 0; i < e.center.size(); ++i) {
        Rational r = x[i] - e.center[i];
        if (r < 0) r = -r;
        if (r > m) m = r;
      }
      return Scalar::of(std::move(m));
    }
    case ExprKind::abs_value:
      return scalar_abs(eval_scalar(*e.args[0], x));
    case ExprKind::scale:
      return Scalar::of(e.factor) * eval_scalar(*e.args[0], x);
    case ExprKind::sum: {
      Scalar s = eval_scalar(*e.args[0], x);
      for (size_t i = 1; i < e.args.size(); ++i) s = s + eval_scalar(*e.args[i], x);
      return s;
    }
    case ExprKind::min: {
      Scalar m = eval_scalar(*e.args[0], x);
      for (size_t i = 1; i < e.args.size(); ++i) m = scalar_min(m, eval_scalar(*e.args[i], x));
      return m;
    }
    case ExprKind::max: {
      Scalar m = eval_scalar(*e.args[0], x);
      for (size_t i = 1; i < e.args.size(); ++i) m = scalar_max(m, eval_scalar(*e.args[i], x));
      return m;
    }
  }
  return Scalar::of(0.0);  // unreachable
}

/// One-sided directional derivative f'(xbar; d), computed structurally.
/// Valid for every expression in the grammar (all nodes admit one-sided
/// directional derivatives and the recursion rules are exact for them).
inline Scalar directional_derivative(const Expr& e, std::span<const Rational> xbar,
                                     std::span<const Rational> d) {
  switch (e.kind) {
    case ExprKind::constant:
      return Scalar::of(Rational(0));
    case ExprKind::variable:
      return Scalar::of(d[static_cast<size_t>(e.index)]);
    case ExprKind::affine: {
      Rational s = 0;
      for (size_t i = 0; i < e.coeffs.size(); ++i) s += e.coeffs[i] * d[i];
      return Scalar::of(std::move(s));
    }
    case ExprKind::norm: {
      if (e.norm_kind == NormKind::euclidean) {
        Rational rr = 0, rd = 0, dd_ = 0;
        for (size_t i = 0; i < e.center.size(); ++i) {
          Rational r = xbar[i] - e.center[i];
          rr += r * r;
          rd += r * d[i];
          dd_ += d[i] * d[i];
        }
        if (rr == 0) {
          if (auto root = exact_sqrt(dd_)) return Scalar::of(std::move(*root));
          return Scalar::of(std::sqrt(to_double(dd_)));
        }
        if (auto root = exact_sqrt(rr))
          return Scalar::of(Rational(rd / *root));
        return Scalar::of(to_double(rd) / std::sqrt(to_double(rr)));
      }
      // max norm: max over active coordinates of d/dt |r_i + t d_i| at 0+.
      Rational m = 0;
      for (size_t i = 0; i < e.center.size(); ++i) {
        Rational r = xbar[i] - e.center[i];
        if (r < 0) r = -r;
        if (r > m) m = r;
      }
      if (m == 0) {
        Rational best = 0;
        for (size_t i = 0; i < d.size(); ++i) {
          Rational a = d[i] < 0 ? Rational(-d[i]) : d[i];
          if (a > best) best = a;
        }
        return Scalar::of(std::move(best));
      }
      bool first = true;
      Rational best = 0;
      for (size_t i = 0; i < e.center.size(); ++i) {
        Rational r = xbar[i] - e.center[i];
        Rational a = r < 0 ? Rational(-r) : r;
        if (a != m) continue;
        Rational slope = r > 0 ? d[i] : Rational(-d[i]);
        if (first || slope > best) {
          best = slope;
          first = false;
        }
      }
      return Scalar::of(std::move(best));
    }
    case ExprKind::abs_value: {
      Scalar v = eval_scalar(*e.args[0], xbar);
      int sgn = scalar_sign(v);
      Scalar inner = directional_derivative(*e.args[0], xbar, d);
      if (sgn > 0) return inner;
      if (sgn < 0) return -inner;
      return scalar_abs(inner);
    }
    case ExprKind::scale:
      return Scalar::of(e.factor) * directional_derivative(*e.args[0], xbar, d);
    case ExprKind::sum: {
      Scalar s = directional_derivative(*e.args[0], xbar, d);
      for (size_t i = 1; i < e.args.size(); ++i)
        s = s + directional_derivative(*e.args[i], xbar, d);
      return s;
    }
    case ExprKind::min:
    case ExprKind::max: {
      // Active arguments at xbar drive the one-sided derivative.
      std::vector<Scalar> vals;
      vals.reserve(e.args.size());
      for (const auto& a : e.args) vals.push_back(eval_scalar(*a, xbar));
      Scalar extreme = vals[0];
      for (size_t i = 1; i < vals.size(); ++i)
        extreme = e.kind == ExprKind::min ? scalar_min(extreme, vals[i])
                                          : scalar_max(extreme, vals[i]);
      bool first = true;
      Scalar best;
      for (size_t i = 0; i < e.args.size(); ++i) {
        Scalar diff = vals[i] - extreme;
        if (scalar_sign(diff) != 0) continue;
        Scalar der = directional_derivative(*e.args[i], xbar, d);
        if (first) {
          best = der;
          first = false;
        } else {
          best = e.kind == ExprKind::min ? scalar_min(best, der) : scalar_max(best, der);
        }
      }
      return best;
    }
  }
  return Scalar::of(0.0);  // unreachable
}

}  // namespace radepi
