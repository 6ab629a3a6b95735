#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radepi/classify.hpp"
#include "radepi/domain.hpp"
#include "radepi/estimator_config.hpp"
#include "radepi/expr.hpp"
#include "radepi/problem.hpp"
#include "radepi/rng.hpp"

namespace radepi {

enum class EpiMethod { exact_rule, finite_enumeration, estimator };
enum class EpiStatus { ok, undefined_along_ray, diverged };

inline const char* to_string(EpiMethod m) {
  switch (m) {
    case EpiMethod::exact_rule: return "exact-rule";
    case EpiMethod::finite_enumeration: return "finite-domain-enumeration";
    case EpiMethod::estimator: return "estimator";
  }
  return "estimator";
}
inline const char* to_string(EpiStatus s) {
  switch (s) {
    case EpiStatus::ok: return "ok";
    case EpiStatus::undefined_along_ray: return "undefined-along-ray";
    case EpiStatus::diverged: return "not-epidifferentiable-numeric";
  }
  return "ok";
}

struct EpiValue {
  EpiStatus status = EpiStatus::ok;
  Scalar value;
  EpiMethod method = EpiMethod::estimator;
  std::string rule;  // which exact rule fired, empty otherwise
  int samples = 0;   // estimator diagnostics
  double grid_lo = 0, grid_hi = 0;
  bool sampled_restriction = false;

  bool ok() const { return status == EpiStatus::ok; }
  bool is_exact() const { return ok() && value.is_exact() && method != EpiMethod::estimator; }

  static EpiValue undefined() {
    EpiValue v;
    v.status = EpiStatus::undefined_along_ray;
    return v;
  }
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (hi < lo) std::swap(lo, hi);
  if (lo <= 0) lo = hi > 0 ? hi * 1e-12 : 1e-12;
  std::vector<double> ts(static_cast<size_t>(count));
  if (count == 1 || lo == hi) {
    ts.assign(static_cast<size_t>(count), hi);
    return ts;
  }
  double ratio = std::log(hi / lo);
  for (int i = 0; i < count; ++i)
    ts[static_cast<size_t>(i)] = lo * std::exp(ratio * static_cast<double>(i) / (count - 1));
  ts.back() = hi;  // endpoint matters for bounded sections
  return ts;
}

inline std::vector<std::vector<double>> perturbation_directions(int n, const EstimatorConfig& cfg) {
  std::vector<std::vector<double>> dirs;
  Rng rng(cfg.seed);
  for (int k = 0; k < cfg.perturb_count; ++k) dirs.push_back(rng.unit_vector(n));
  return dirs;
}

}  // namespace detail

/// Sampling estimator for the radial epiderivative of an arbitrary callable
/// over a t-interval: min over the t-grid and direction perturbations of the
/// difference quotient. An upper estimate of the true infimum.
template <class F>
EpiValue estimate_radial(F&& f, std::span<const double> xbar, std::span<const double> d,
                         double lo, double hi, const EstimatorConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(xbar.size());
  double f0 = f(xbar);
  double lo_eff = std::max(lo, cfg.t_min);
  double hi_eff = hi;
  if (hi_eff < lo_eff) lo_eff = std::max(hi_eff * 1e-9, 1e-300);
  auto ts = detail::log_grid(lo_eff, hi_eff, cfg.t_count);
  auto perturbs = detail::perturbation_directions(n, cfg);

  std::vector<double> pt(static_cast<size_t>(n)), u(static_cast<size_t>(n));
  double best = std::numeric_limits<double>::infinity();
  int samples = 0;
  auto visit = [&](double t, std::span<const double> dir) {
    for (int i = 0; i < n; ++i) pt[static_cast<size_t>(i)] = xbar[i] + t * dir[i];
    double q = (f(std::span<const double>(pt)) - f0) / t;
    best = std::min(best, q);
    ++samples;
  };
  for (double t : ts) {
    visit(t, d);
    for (const auto& xi : perturbs) {
      for (int i = 0; i < n; ++i) u[static_cast<size_t>(i)] = d[i] + cfg.perturb_radius * xi[static_cast<size_t>(i)];
      visit(t, u);
    }
  }

  EpiValue out;
  out.method = EpiMethod::estimator;
  out.samples = samples;
  out.grid_lo = ts.front();
  out.grid_hi = ts.back();
  out.value = Scalar::of(best);
  if (best < cfg.divergence_floor) out.status = EpiStatus::diverged;
  return out;
}

/// f^r by the convex rule: for convex f the difference quotient is
/// nondecreasing in t, so the infimum is the one-sided directional derivative.
inline EpiValue radial_epiderivative_convex(const Expr& e, std::span<const Rational> xbar,
                                            std::span<const Rational> d) {
  EpiValue v;
  v.method = EpiMethod::exact_rule;
  v.rule = "convex-directional";
  v.value = directional_derivative(e, xbar, d);
  return v;
}

/// f^r of <a,x> - c||x-b|| + beta: equals <a,d> - c||d||, independent of the
/// evaluation point and the center.
inline EpiValue radial_epiderivative_norm_linear(std::span<const Rational> a, const Rational& c,
                                                 std::span<const Rational> d,
                                                 NormKind kind = NormKind::euclidean) {
  if (c < 0) throw ExprError("norm-linear rule needs c >= 0");
  Scalar lin = Scalar::of(dot(a, d));
  Scalar nrm;
  if (kind == NormKind::euclidean) {
    Rational ss = 0;
    for (const auto& di : d) ss += di * di;
    if (auto root = exact_sqrt(ss))
      nrm = Scalar::of(*root);
    else
      nrm = Scalar::of(std::sqrt(to_double(ss)));
  } else {
    nrm = Scalar::of(max_norm(d));
  }
  EpiValue v;
  v.method = EpiMethod::exact_rule;
  v.rule = "norm-linear";
  v.value = lin - Scalar::of(c) * nrm;
  return v;
}

/// f^r of min_j { <a_j, x> + alpha_j }: equals min_j <a_j, d>, independent of
/// the evaluation point.
inline EpiValue radial_epiderivative_min_affine(std::span<const AffineForm> forms,
                                                std::span<const Rational> d) {
  if (forms.empty()) throw ExprError("min-affine rule needs at least one piece");
  Rational best = dot(forms[0].a, d);
  for (size_t j = 1; j < forms.size(); ++j) best = std::min(best, dot(forms[j].a, d));
  EpiValue v;
  v.method = EpiMethod::exact_rule;
  v.rule = "min-affine";
  v.value = Scalar::of(best);
  return v;
}

namespace detail {

inline Scalar quotient_at(const Expr& e, std::span<const Rational> xbar,
                          std::span<const Rational> d, const Rational& t) {
  RationalVector pt(xbar.size());
  for (size_t i = 0; i < xbar.size(); ++i) pt[i] = xbar[i] + t * d[i];
  Scalar num = eval_scalar(e, pt) - eval_scalar(e, xbar);
  return num / Scalar::of(t);
}

}  // namespace detail

/// Radial epiderivative of e at xbar along d, restricted to `dom`:
///   inf over {t > 0 : xbar + t d in dom} of the difference quotient
/// (the inner liminf over u -> d is attained at u = d for this continuous
/// expression class; the estimator keeps perturbation samples as a safeguard).
/// Dispatch: exact calculus rule -> exact enumeration on finite domains ->
/// sampling estimator.
inline EpiValue radial_epiderivative(const Expr& e, std::span<const Rational> xbar,
                                     std::span<const Rational> d, const Domain& dom,
                                     const EstimatorConfig& cfg) {
  const int n = dom.dimension();
  check_dimension(e, n);
  if (static_cast<int>(xbar.size()) != n || static_cast<int>(d.size()) != n)
    throw DimensionError("point/direction dimension mismatch");
  if (is_zero_vector(d)) throw ExprError("direction must be nonzero");

  auto sec = dom.ray_section(xbar, d);
  using SK = Domain::RaySection::Kind;
  if (sec.kind == SK::empty) return EpiValue::undefined();

  if (sec.kind == SK::finite) {
    Scalar f0 = eval_scalar(e, xbar);
    bool first = true;
    Scalar best;
    for (const auto& t : sec.ts) {
      RationalVector pt(xbar.size());
      for (size_t i = 0; i < xbar.size(); ++i) pt[i] = xbar[i] + t * d[i];
      Scalar q = (eval_scalar(e, pt) - f0) / Scalar::of(t);
      best = first ? q : scalar_min(best, q);
      first = false;
    }
    EpiValue v;
    v.method = EpiMethod::finite_enumeration;
    v.value = best;
    v.samples = static_cast<int>(sec.ts.size());
    return v;
  }

  // Interval section [lo, hi] (lo == 0 means open at zero).
  Classification cls = classify(e, n);
  const bool open_at_zero = sec.lo == 0;
  const bool unbounded = !sec.hi.has_value();

  if (cls.affine_form) {
    EpiValue v;
    v.method = EpiMethod::exact_rule;
    v.rule = "affine";
    v.value = Scalar::of(dot(cls.affine_form->a, d));
    return v;
  }
  if (cls.min_pieces) {
    // Concave along every ray: the quotient is nonincreasing in t.
    if (unbounded) {
      EpiValue v = radial_epiderivative_min_affine(*cls.min_pieces, d);
      return v;
    }
    EpiValue v;
    v.method = EpiMethod::exact_rule;
    v.rule = "min-affine-endpoint";
    v.value = detail::quotient_at(e, xbar, d, *sec.hi);
    return v;
  }
  if (cls.norm_linear) {
    // Concave along every ray, same reasoning as min-affine.
    if (unbounded) {
      EpiValue v = radial_epiderivative_norm_linear(cls.norm_linear->a, cls.norm_linear->c, d,
                                                    cls.norm_linear->norm_kind);
      return v;
    }
    EpiValue v;
    v.method = EpiMethod::exact_rule;
    v.rule = "norm-linear-endpoint";
    v.value = detail::quotient_at(e, xbar, d, *sec.hi);
    return v;
  }
  if (cls.convex) {
    // Quotient nondecreasing in t: infimum sits at the small end.
    if (open_at_zero) return radial_epiderivative_convex(e, xbar, d);
    EpiValue v;
    v.method = EpiMethod::exact_rule;
    v.rule = "convex-startpoint";
    v.value = detail::quotient_at(e, xbar, d, sec.lo);
    return v;
  }

  auto xbar_d = to_double_vector(xbar);
  auto d_d = to_double_vector(d);
  double lo = sec.lo > 0 ? to_double(sec.lo) : cfg.t_min;
  double hi = sec.hi ? to_double(*sec.hi) : cfg.t_max;
  return estimate_radial([&e](std::span<const double> x) { return eval(e, x); },
                         std::span<const double>(xbar_d), std::span<const double>(d_d), lo, hi,
                         cfg);
}

// ---------------------------------------------------------------------------
// Classical derivative estimates (directional, Rockafellar subderivative,
// Clarke). Finite-sample estimates used by the inequality-chain checks.
// ---------------------------------------------------------------------------

template <class F>
double numeric_directional_derivative(F&& f, std::span<const double> xbar,
                                      std::span<const double> d, const EstimatorConfig& cfg) {
  const size_t n = xbar.size();
  std::vector<double> pt(n);
  double f0 = f(xbar);
  double t = cfg.small_t_min;
  for (size_t i = 0; i < n; ++i) pt[i] = xbar[i] + t * d[i];
  return (f(std::span<const double>(pt)) - f0) / t;
}

template <class F>
double numeric_subderivative(F&& f, std::span<const double> xbar, std::span<const double> d,
                             const EstimatorConfig& cfg) {
  const size_t n = xbar.size();
  auto ts = detail::log_grid(cfg.small_t_min, cfg.small_t_max, cfg.small_t_count);
  auto perturbs = detail::perturbation_directions(static_cast<int>(n), cfg);
  std::vector<double> pt(n), u(n);
  double f0 = f(xbar);
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](double t, std::span<const double> dir) {
    for (size_t i = 0; i < n; ++i) pt[i] = xbar[i] + t * dir[i];
    best = std::min(best, (f(std::span<const double>(pt)) - f0) / t);
  };
  for (double t : ts) {
    visit(t, d);
    for (const auto& xi : perturbs) {
      for (size_t i = 0; i < n; ++i) u[i] = d[i] + cfg.perturb_radius * xi[i];
      visit(t, u);
    }
  }
  return best;
}

template <class F>
double numeric_clarke(F&& f, std::span<const double> xbar, std::span<const double> d,
                      const EstimatorConfig& cfg) {
  const size_t n = xbar.size();
  auto ts = detail::log_grid(cfg.small_t_min, cfg.small_t_max, cfg.small_t_count);
  Rng rng(cfg.seed);
  std::vector<std::vector<double>> bases;
  bases.push_back(std::vector<double>(xbar.begin(), xbar.end()));
  for (int k = 0; k < cfg.clarke_samples; ++k) {
    auto xi = rng.unit_vector(static_cast<int>(n));
    double r = cfg.clarke_radius * rng.uniform01();
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = xbar[i] + r * xi[i];
    bases.push_back(std::move(y));
  }
  std::vector<double> pt(n);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& y : bases) {
    double fy = f(std::span<const double>(y));
    for (double t : ts) {
      for (size_t i = 0; i < n; ++i) pt[i] = y[i] + t * d[i];
      best = std::max(best, (f(std::span<const double>(pt)) - fy) / t);
    }
  }
  return best;
}

inline double numeric_directional_derivative(const Expr& e, std::span<const Rational> xbar,
                                             std::span<const Rational> d,
                                             const EstimatorConfig& cfg) {
  auto x = to_double_vector(xbar);
  auto dd = to_double_vector(d);
  return numeric_directional_derivative([&e](std::span<const double> p) { return eval(e, p); },
                                        std::span<const double>(x), std::span<const double>(dd),
                                        cfg);
}
inline double numeric_subderivative(const Expr& e, std::span<const Rational> xbar,
                                    std::span<const Rational> d, const EstimatorConfig& cfg) {
  auto x = to_double_vector(xbar);
  auto dd = to_double_vector(d);
  return numeric_subderivative([&e](std::span<const double> p) { return eval(e, p); },
                               std::span<const double>(x), std::span<const double>(dd), cfg);
}
inline double numeric_clarke(const Expr& e, std::span<const Rational> xbar,
                             std::span<const Rational> d, const EstimatorConfig& cfg) {
  auto x = to_double_vector(xbar);
  auto dd = to_double_vector(d);
  return numeric_clarke([&e](std::span<const double> p) { return eval(e, p); },
                        std::span<const double>(x), std::span<const double>(dd), cfg);
}

// ---------------------------------------------------------------------------
// Lower-Lipschitz probe: samples f(x) - f(xbar) >= -L ||x - xbar||. A pass is
// evidence up to the samples taken, not a proof; a violation is a witness.
// ---------------------------------------------------------------------------

struct LipschitzProbeConfig {
  double constant = 1.0;  // candidate L
  int radii = 64;
  int directions_per_radius = 8;
  double radius_min = 1e-12;
  double radius_max = 1e3;
  std::uint64_t seed = 1;
};

struct LipschitzProbeResult {
  bool holds = true;
  std::optional<std::vector<double>> witness;
};

template <class F>
LipschitzProbeResult is_lower_lipschitz_probe(F&& f, std::span<const double> xbar,
                                              const LipschitzProbeConfig& cfg) {
  const size_t n = xbar.size();
  double f0 = f(xbar);
  auto radii = detail::log_grid(cfg.radius_min, cfg.radius_max, cfg.radii);
  Rng rng(cfg.seed);
  std::vector<double> pt(n);
  const double slack = 1e-9;
  for (double r : radii) {
    for (int k = 0; k < cfg.directions_per_radius; ++k) {
      auto xi = rng.unit_vector(static_cast<int>(n));
      for (size_t i = 0; i < n; ++i) pt[i] = xbar[i] + r * xi[i];
      double lhs = f(std::span<const double>(pt)) - f0;
      double rhs = -cfg.constant * r;
      if (lhs < rhs - slack * std::max(1.0, std::fabs(rhs))) {
        LipschitzProbeResult res;
        res.holds = false;
        res.witness = pt;
        return res;
      }
    }
  }
  return {};
}

inline LipschitzProbeResult is_lower_lipschitz_probe(const Expr& e,
                                                     std::span<const Rational> xbar,
                                                     const LipschitzProbeConfig& cfg) {
  auto x = to_double_vector(xbar);
  return is_lower_lipschitz_probe([&e](std::span<const double> p) { return eval(e, p); },
                                  std::span<const double>(x), cfg);
}

// ---------------------------------------------------------------------------
// Feasible-set restricted scan: the epiderivative of the objective restricted
// to S = X ∩ {g <= 0}, plus the best feasible point on the ray. Exact on
// finite domains; sampled with exact verification of the selected point
// otherwise.
// ---------------------------------------------------------------------------

struct RayScan {
  bool any_feasible = false;
  EpiValue epi;
  std::optional<RationalVector> best_point;  // feasible argmin of f on the ray
  Scalar best_f;
  std::optional<Rational> best_t;
  std::optional<RationalVector> min_quotient_point;
  std::optional<Rational> min_quotient_t;
};

inline RayScan scan_feasible_ray(const Problem& p, std::span<const Rational> xbar,
                                 std::span<const Rational> d, const EstimatorConfig& cfg) {
  if (is_zero_vector(d)) throw ExprError("direction must be nonzero");
  RayScan scan;
  scan.epi = EpiValue::undefined();
  const Expr& f = *p.objective;
  Scalar f0 = eval_scalar(f, xbar);

  auto consider = [&](const Rational& t, const RationalVector& pt) {
    Scalar fx = eval_scalar(f, pt);
    Scalar q = (fx - f0) / Scalar::of(t);
    if (!scan.any_feasible || scalar_less(q, scan.epi.value)) {
      scan.epi.value = q;
      scan.min_quotient_point = pt;
      scan.min_quotient_t = t;
    }
    if (!scan.any_feasible || scalar_less(fx, scan.best_f)) {
      scan.best_f = fx;
      scan.best_point = pt;
      scan.best_t = t;
    }
    scan.any_feasible = true;
    scan.epi.status = EpiStatus::ok;
    ++scan.epi.samples;
  };

  auto sec = p.domain.ray_section(xbar, d);
  using SK = Domain::RaySection::Kind;
  if (sec.kind == SK::empty) return scan;

  if (sec.kind == SK::finite) {
    scan.epi.method = EpiMethod::finite_enumeration;
    for (const auto& t : sec.ts) {
      RationalVector pt(xbar.size());
      for (size_t i = 0; i < xbar.size(); ++i) pt[i] = xbar[i] + t * d[i];
      if (!p.constraints_satisfied(pt)) continue;
      consider(t, pt);
    }
    return scan;
  }

  // Continuous section: cheap double prefilter over the grid, then exact
  // verification of the few samples that can win either selection.
  scan.epi.method = EpiMethod::estimator;
  scan.epi.sampled_restriction = true;
  double lo = sec.lo > 0 ? to_double(sec.lo) : cfg.t_min;
  double hi = sec.hi ? to_double(*sec.hi) : cfg.t_max;
  auto ts = detail::log_grid(std::max(lo, cfg.t_min), hi, cfg.t_count);
  auto xd = to_double_vector(xbar);
  auto dd = to_double_vector(d);
  const double filter_tol = 1e-9;

  struct Sample {
    Rational t;
    double q;
    double f;
  };
  std::vector<Sample> candidates;
  std::vector<double> pt(xd.size());
  double f0d = eval(f, std::span<const double>(xd));
  auto prefilter = [&](const Rational& tr, double t) {
    for (size_t i = 0; i < pt.size(); ++i) pt[i] = xd[i] + t * dd[i];
    if (!p.feasible(std::span<const double>(pt), filter_tol)) return;
    double fv = eval(f, std::span<const double>(pt));
    candidates.push_back({tr, (fv - f0d) / t, fv});
  };
  for (double t : ts) prefilter(rational_from_double(t), t);
  // Exact endpoints: double rounding must not lose a boundary-only sample.
  if (sec.hi) prefilter(*sec.hi, to_double(*sec.hi));
  if (sec.lo > 0) prefilter(sec.lo, to_double(sec.lo));

  auto verify = [&](const Rational& t) -> std::optional<RationalVector> {
    RationalVector pr(xbar.size());
    for (size_t i = 0; i < xbar.size(); ++i) pr[i] = xbar[i] + t * d[i];
    if (!p.feasible(pr)) return std::nullopt;
    return pr;
  };
  auto select = [&](auto key) {
    std::vector<size_t> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      double ka = key(candidates[a]), kb = key(candidates[b]);
      if (ka != kb) return ka < kb;
      return candidates[a].t < candidates[b].t;
    });
    for (size_t idx : order) {
      if (auto pr = verify(candidates[idx].t)) {
        consider(candidates[idx].t, *pr);
        return;
      }
    }
  };
  select([](const Sample& s) { return s.q; });
  select([](const Sample& s) { return s.f; });
  return scan;
}

}  // namespace radepi
