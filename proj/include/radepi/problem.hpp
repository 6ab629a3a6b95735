#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "radepi/domain.hpp"
#include "radepi/estimator_config.hpp"
#include "radepi/expr.hpp"

namespace radepi {

/// minimize f(x) subject to g_i(x) <= 0 and x in the ground set X.
struct Problem {
  int dimension = 0;
  std::vector<std::string> variables;
  ExprPtr objective;
  std::vector<ExprPtr> constraints;
  Domain domain = Domain::all_space(0);
  std::vector<RationalVector> candidate_points;
  std::vector<RationalVector> direction_hints;
  EstimatorConfig estimator;

  void validate() const {
    if (dimension <= 0) throw DimensionError("problem dimension must be positive");
    if (!objective) throw ExprError("problem has no objective");
    check_dimension(*objective, dimension);
    for (const auto& g : constraints) check_dimension(*g, dimension);
    if (domain.dimension() != dimension)
      throw DimensionError("domain dimension does not match problem dimension");
    for (const auto& p : candidate_points)
      if (static_cast<int>(p.size()) != dimension)
        throw DimensionError("candidate point has wrong dimension");
    for (const auto& d : direction_hints)
      if (static_cast<int>(d.size()) != dimension)
        throw DimensionError("direction has wrong dimension");
    estimator.validate();
  }

  bool constraints_satisfied(std::span<const Rational> x) const {
    for (const auto& g : constraints) {
      Scalar v = eval_scalar(*g, x);
      if (v.exact ? (*v.exact > 0) : (v.approx > 0)) return false;
    }
    return true;
  }

  bool feasible(std::span<const Rational> x) const {
    return domain.contains(x) && constraints_satisfied(x);
  }

  bool feasible(std::span<const double> x, double tol = 0.0) const {
    if (!domain.contains(x, tol)) return false;
    for (const auto& g : constraints)
      if (eval(*g, x) > tol) return false;
    return true;
  }

  /// Finite domains only: S = X intersected with the constraint set.
  std::vector<RationalVector> feasible_points() const {
    std::vector<RationalVector> out;
    if (domain.kind() != Domain::Kind::finite) return out;
    for (const auto& p : domain.points())
      if (constraints_satisfied(p)) out.push_back(p);
    return out;
  }

  /// Indices (0-based) with |g_i(xbar)| <= tol; tol = 0 on the exact path.
  std::vector<int> active_set(std::span<const Rational> xbar, const Rational& tol) const {
    std::vector<int> idx;
    for (size_t i = 0; i < constraints.size(); ++i) {
      Scalar v = eval_scalar(*constraints[i], xbar);
      bool active;
      if (v.exact) {
        Rational a = *v.exact < 0 ? Rational(-*v.exact) : *v.exact;
        active = a <= tol;
      } else {
        double t = to_double(tol);
        if (t == 0) t = 1e-9;  // float fallback needs slack
        active = std::fabs(v.approx) <= t;
      }
      if (active) idx.push_back(static_cast<int>(i));
    }
    return idx;
  }
};

}  // namespace radepi
