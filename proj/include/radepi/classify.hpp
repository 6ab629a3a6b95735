#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radepi/expr.hpp"

namespace radepi {

/// <a,x> + alpha
struct AffineForm {
  RationalVector a;
  Rational alpha{};
};

inline bool operator==(const AffineForm& l, const AffineForm& r) {
  return l.alpha == r.alpha && l.a == r.a;
}

/// <a,x> - c*||x - b|| + beta with c >= 0
struct NormLinearForm {
  RationalVector a;
  Rational beta{};
  Rational c{};
  RationalVector center;
  NormKind norm_kind = NormKind::euclidean;
};

enum class StructureTag { affine, convex, negative_norm_linear, min_affine, max_min_affine, general };

inline const char* to_string(StructureTag t) {
  switch (t) {
    case StructureTag::affine: return "affine";
    case StructureTag::convex: return "convex";
    case StructureTag::negative_norm_linear: return "negative-norm-linear";
    case StructureTag::min_affine: return "min-affine";
    case StructureTag::max_min_affine: return "max-min-affine";
    case StructureTag::general: return "general";
  }
  return "general";
}

/// Sound structural facts about an expression. Tags are conservative: a set
/// payload is always correct, absence means "not recognized".
struct Classification {
  StructureTag tag = StructureTag::general;
  std::optional<AffineForm> affine_form;
  std::optional<std::vector<AffineForm>> min_pieces;  // expr == min over pieces
  std::optional<std::vector<AffineForm>> max_pieces;  // expr == max over pieces
  std::optional<NormLinearForm> norm_linear;
  std::optional<std::vector<std::vector<AffineForm>>> max_min_pieces;
  bool convex = false;
  bool concave = false;
};

namespace detail {

constexpr size_t kMaxPieces = 64;

struct Shape {
  std::optional<AffineForm> aff;
  std::optional<std::vector<AffineForm>> mins;
  std::optional<std::vector<AffineForm>> maxs;
  bool convex = false;
  bool concave = false;
};

inline AffineForm scale_form(const AffineForm& f, const Rational& c) {
  AffineForm out;
  out.a.reserve(f.a.size());
  for (const auto& v : f.a) out.a.push_back(v * c);
  out.alpha = f.alpha * c;
  return out;
}

inline AffineForm add_forms(const AffineForm& l, const AffineForm& r) {
  AffineForm out = l;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += r.a[i];
  out.alpha += r.alpha;
  return out;
}

inline void dedup_pieces(std::vector<AffineForm>& pieces) {
  std::vector<AffineForm> out;
  for (auto& p : pieces) {
    bool seen = false;
    for (const auto& q : out)
      if (q == p) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(std::move(p));
  }
  pieces = std::move(out);
}

inline std::optional<std::vector<AffineForm>> cross_sum(
    const std::vector<const std::vector<AffineForm>*>& lists) {
  size_t total = 1;
  for (const auto* l : lists) {
    total *= l->size();
    if (total > kMaxPieces) return std::nullopt;
  }
  std::vector<AffineForm> acc = *lists[0];
  for (size_t k = 1; k < lists.size(); ++k) {
    std::vector<AffineForm> next;
    next.reserve(acc.size() * lists[k]->size());
    for (const auto& l : acc)
      for (const auto& r : *lists[k]) next.push_back(add_forms(l, r));
    acc = std::move(next);
    if (acc.size() > kMaxPieces) return std::nullopt;
  }
  dedup_pieces(acc);
  return acc;
}

inline std::vector<AffineForm> scale_pieces(const std::vector<AffineForm>& ps, const Rational& c) {
  std::vector<AffineForm> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(scale_form(p, c));
  return out;
}

inline AffineForm affine_of_expr(const Expr& e, int n) {
  AffineForm f;
  f.a.assign(static_cast<size_t>(n), Rational(0));
  switch (e.kind) {
    case ExprKind::constant:
      f.alpha = e.value;
      break;
    case ExprKind::variable:
      f.a[static_cast<size_t>(e.index)] = 1;
      break;
    case ExprKind::affine:
      f.a = e.coeffs;
      f.alpha = e.offset;
      break;
    default:
      break;
  }
  return f;
}

inline Shape shape_of(const Expr& e, int n) {
  Shape s;
  switch (e.kind) {
    case ExprKind::constant:
    case ExprKind::variable:
    case ExprKind::affine: {
      s.aff = affine_of_expr(e, n);
      s.mins = std::vector<AffineForm>{*s.aff};
      s.maxs = std::vector<AffineForm>{*s.aff};
      s.convex = s.concave = true;
      return s;
    }
    case ExprKind::norm: {
      s.convex = true;
      // Max norm, and the 1-D Euclidean norm, are max-affine.
      if (e.norm_kind == NormKind::max || e.center.size() == 1) {
        std::vector<AffineForm> pieces;
        for (size_t i = 0; i < e.center.size(); ++i) {
          AffineForm plus, minus;
          plus.a.assign(static_cast<size_t>(n), Rational(0));
          minus.a.assign(static_cast<size_t>(n), Rational(0));
          plus.a[i] = 1;
          plus.alpha = -e.center[i];
          minus.a[i] = -1;
          minus.alpha = e.center[i];
          pieces.push_back(std::move(plus));
          pieces.push_back(std::move(minus));
        }
        dedup_pieces(pieces);
        s.maxs = std::move(pieces);
      }
      return s;
    }
    case ExprKind::abs_value: {
      Shape inner = shape_of(*e.args[0], n);
      if (inner.aff) {
        s.maxs = std::vector<AffineForm>{*inner.aff, scale_form(*inner.aff, Rational(-1))};
        dedup_pieces(*s.maxs);
        s.convex = true;
      }
      return s;
    }
    case ExprKind::scale: {
      Shape inner = shape_of(*e.args[0], n);
      const Rational& c = e.factor;
      if (inner.aff) s.aff = scale_form(*inner.aff, c);
      if (c >= 0) {
        if (inner.mins) s.mins = scale_pieces(*inner.mins, c);
        if (inner.maxs) s.maxs = scale_pieces(*inner.maxs, c);
        s.convex = inner.convex;
        s.concave = inner.concave;
      } else {
        if (inner.maxs) s.mins = scale_pieces(*inner.maxs, c);
        if (inner.mins) s.maxs = scale_pieces(*inner.mins, c);
        s.convex = inner.concave;
        s.concave = inner.convex;
      }
      if (c == 0) s.convex = s.concave = true;
      return s;
    }
    case ExprKind::sum: {
      std::vector<Shape> shapes;
      shapes.reserve(e.args.size());
      for (const auto& a : e.args) shapes.push_back(shape_of(*a, n));
      bool all_aff = true, all_min = true, all_max = true;
      s.convex = s.concave = true;
      for (const auto& sh : shapes) {
        all_aff &= sh.aff.has_value();
        all_min &= sh.mins.has_value();
        all_max &= sh.maxs.has_value();
        s.convex &= sh.convex;
        s.concave &= sh.concave;
      }
      if (all_aff) {
        AffineForm acc = *shapes[0].aff;
        for (size_t i = 1; i < shapes.size(); ++i) acc = add_forms(acc, *shapes[i].aff);
        s.aff = std::move(acc);
      }
      if (all_min) {
        std::vector<const std::vector<AffineForm>*> lists;
        for (const auto& sh : shapes) lists.push_back(&*sh.mins);
        s.mins = cross_sum(lists);
      }
      if (all_max) {
        std::vector<const std::vector<AffineForm>*> lists;
        for (const auto& sh : shapes) lists.push_back(&*sh.maxs);
        s.maxs = cross_sum(lists);
      }
      return s;
    }
    case ExprKind::min: {
      std::vector<Shape> shapes;
      for (const auto& a : e.args) shapes.push_back(shape_of(*a, n));
      bool all_min = true;
      s.concave = true;
      for (const auto& sh : shapes) {
        all_min &= sh.mins.has_value();
        s.concave &= sh.concave;
      }
      if (e.args.size() == 1) {
        s = shapes[0];
        return s;
      }
      if (all_min) {
        std::vector<AffineForm> pieces;
        for (const auto& sh : shapes)
          for (const auto& p : *sh.mins) pieces.push_back(p);
        if (pieces.size() <= kMaxPieces) {
          dedup_pieces(pieces);
          s.mins = std::move(pieces);
        }
      }
      return s;
    }
    case ExprKind::max: {
      std::vector<Shape> shapes;
      for (const auto& a : e.args) shapes.push_back(shape_of(*a, n));
      bool all_max = true;
      s.convex = true;
      for (const auto& sh : shapes) {
        all_max &= sh.maxs.has_value();
        s.convex &= sh.convex;
      }
      if (e.args.size() == 1) {
        s = shapes[0];
        return s;
      }
      if (all_max) {
        std::vector<AffineForm> pieces;
        for (const auto& sh : shapes)
          for (const auto& p : *sh.maxs) pieces.push_back(p);
        if (pieces.size() <= kMaxPieces) {
          dedup_pieces(pieces);
          s.maxs = std::move(pieces);
        }
      }
      return s;
    }
  }
  return s;
}

/// Flattens e into affine part + scalar multiples of norm nodes, when the
/// tree is built from sums and scales only. Used for norm-linear detection.
inline bool accumulate_norm_linear(const Expr& e, const Rational& mult, int n, AffineForm& aff,
                                   std::vector<std::pair<Rational, const Expr*>>& norms) {
  switch (e.kind) {
    case ExprKind::constant:
      aff.alpha += mult * e.value;
      return true;
    case ExprKind::variable:
      aff.a[static_cast<size_t>(e.index)] += mult;
      return true;
    case ExprKind::affine:
      for (size_t i = 0; i < e.coeffs.size(); ++i) aff.a[i] += mult * e.coeffs[i];
      aff.alpha += mult * e.offset;
      return true;
    case ExprKind::norm:
      norms.emplace_back(mult, &e);
      return true;
    case ExprKind::scale:
      return accumulate_norm_linear(*e.args[0], mult * e.factor, n, aff, norms);
    case ExprKind::sum:
      for (const auto& a : e.args)
        if (!accumulate_norm_linear(*a, mult, n, aff, norms)) return false;
      return true;
    default:
      return false;
  }
}

}  // namespace detail

/// Routes an expression to the matching calculus rule. Sound, not complete:
/// anything unrecognized falls back to `general`.
inline Classification classify(const Expr& e, int n) {
  check_dimension(e, n);
  Classification c;
  detail::Shape s = detail::shape_of(e, n);
  c.convex = s.convex;
  c.concave = s.concave;
  if (s.aff) c.affine_form = s.aff;
  if (s.mins) c.min_pieces = s.mins;
  if (s.maxs) c.max_pieces = s.maxs;

  // Negative norm-linear: affine - c*||x-b|| with c > 0.
  {
    AffineForm aff;
    aff.a.assign(static_cast<size_t>(n), Rational(0));
    std::vector<std::pair<Rational, const Expr*>> norms;
    if (detail::accumulate_norm_linear(e, Rational(1), n, aff, norms) && norms.size() == 1 &&
        norms[0].first < 0) {
      NormLinearForm nl;
      nl.a = aff.a;
      nl.beta = aff.alpha;
      nl.c = -norms[0].first;
      nl.center = norms[0].second->center;
      nl.norm_kind = norms[0].second->norm_kind;
      c.norm_linear = std::move(nl);
    }
  }

  // max-of-min payload, when the top is a max over min-affine children
  // (a plain min/max-affine expression is the degenerate case).
  if (e.kind == ExprKind::max) {
    std::vector<std::vector<AffineForm>> lists;
    bool ok = true;
    size_t total = 0;
    for (const auto& a : e.args) {
      detail::Shape sh = detail::shape_of(*a, n);
      if (!sh.mins) {
        ok = false;
        break;
      }
      total += sh.mins->size();
      lists.push_back(*sh.mins);
    }
    if (ok && total <= detail::kMaxPieces) c.max_min_pieces = std::move(lists);
  } else if (s.maxs) {
    std::vector<std::vector<AffineForm>> lists;
    for (const auto& p : *s.maxs) lists.push_back({p});
    c.max_min_pieces = std::move(lists);
  } else if (s.mins) {
    c.max_min_pieces = std::vector<std::vector<AffineForm>>{*s.mins};
  }

  if (c.affine_form)
    c.tag = StructureTag::affine;
  else if (c.min_pieces)
    c.tag = StructureTag::min_affine;
  else if (c.norm_linear)
    c.tag = StructureTag::negative_norm_linear;
  else if (c.convex)
    c.tag = StructureTag::convex;
  else if (c.max_min_pieces)
    c.tag = StructureTag::max_min_affine;
  else
    c.tag = StructureTag::general;
  return c;
}

}  // namespace radepi
