#include "surf/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace surf {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Position of angle a counterclockwise from base, in [0, kTau).
double rel(double a, double base) {
  double d = std::fmod(a - base, kTau);
  if (d < 0) d += kTau;
  return d;
}

bool closure_contains(const Arc& a, BoundaryPoint p) {
  if (arc_empty(a)) return false;
  return rel(p.angle, a.from.angle) <= arc_extent(a);
}

Arc make_arc(double from, double to) {
  return Arc{normalize_angle(from), normalize_angle(to)};
}

double chord(BoundaryPoint p, BoundaryPoint q) {
  return std::abs(std::sin((q.angle - p.angle) / 2.0));
}

void require_verified(const CrossRatioFn& B) {
  if (!B.verified)
    throw axiom_error("cross ratio '" + B.family +
                      "' has not passed the axiom battery");
}

void require_admissible(const Box& b) {
  if (!box_admissible(b)) throw construction_error("box arcs overlap");
}

}  // namespace

bool arc_empty(const Arc& a) { return a.from.angle == a.to.angle; }

double arc_extent(const Arc& a) {
  if (arc_empty(a)) return 0.0;
  return rel(a.to.angle, a.from.angle);
}

bool arc_contains(const Arc& a, BoundaryPoint p) {
  if (arc_empty(a)) return false;
  return rel(p.angle, a.from.angle) < arc_extent(a);
}

bool arcs_equal(const Arc& a, const Arc& b) {
  if (arc_empty(a) && arc_empty(b)) return true;
  return a.from.angle == b.from.angle && a.to.angle == b.to.angle;
}

bool arcs_disjoint(const Arc& a, const Arc& b) {
  return arc_intersection(a, b).empty();
}

bool arc_closures_disjoint(const Arc& a, const Arc& b) {
  if (arc_empty(a) || arc_empty(b)) return true;
  return !closure_contains(a, b.from) && !closure_contains(a, b.to) &&
         !closure_contains(b, a.from) && !closure_contains(b, a.to);
}

std::vector<Arc> arc_intersection(const Arc& a, const Arc& b) {
  std::vector<Arc> out;
  if (arc_empty(a) || arc_empty(b)) return out;
  double la = arc_extent(a);
  double s = rel(b.from.angle, a.from.angle);
  double lb = arc_extent(b);
  // b as up to two linear pieces in the coordinate where a = [0, la).
  double pieces[2][2] = {{s, std::min(s + lb, kTau)}, {0.0, s + lb - kTau}};
  for (auto& piece : pieces) {
    double lo = std::max(piece[0], 0.0), hi = std::min(piece[1], la);
    if (lo < hi) out.push_back(make_arc(a.from.angle + lo, a.from.angle + hi));
  }
  return out;
}

bool box_admissible(const Box& b) {
  return arcs_equal(b.I, b.J) || arcs_disjoint(b.I, b.J);
}

bool box_empty(const Box& b) { return arc_empty(b.I) || arc_empty(b.J); }

bool box_contains(const Box& b, BoundaryPoint a, BoundaryPoint p) {
  return (arc_contains(b.I, a) && arc_contains(b.J, p)) ||
         (arc_contains(b.I, p) && arc_contains(b.J, a));
}

bool boxes_disjoint(const Box& a, const Box& b) {
  auto meet = [](const Arc& u, const Arc& v) { return !arcs_disjoint(u, v); };
  return !((meet(a.I, b.I) && meet(a.J, b.J)) ||
           (meet(a.I, b.J) && meet(a.J, b.I)));
}

AdmissibleList::AdmissibleList(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
  for (const Box& b : boxes_) require_admissible(b);
}

bool AdmissibleList::pairwise_disjoint() const {
  if (disjoint_ < 0) {
    disjoint_ = 1;
    for (std::size_t i = 0; i < boxes_.size() && disjoint_; ++i)
      for (std::size_t j = i + 1; j < boxes_.size() && disjoint_; ++j)
        if (!boxes_disjoint(boxes_[i], boxes_[j])) disjoint_ = 0;
  }
  return disjoint_ == 1;
}

bool list_contains(const AdmissibleList& l, BoundaryPoint a, BoundaryPoint b) {
  for (const Box& box : l.boxes())
    if (box_contains(box, a, b)) return true;
  return false;
}

AdmissibleList complement(const Box& b) {
  require_admissible(b);
  if (box_empty(b)) throw construction_error("complement of a degenerate box");
  const Arc& I = b.I;
  const Arc& J = b.J;
  if (arcs_equal(I, J)) {
    Arc K{I.to, I.from};  // the rest of the circle
    return AdmissibleList({Box{I, K}, Box{K, K}});
  }
  // Circle = I + K + J + L in ccw order; every geodesic not joining I to J
  // joins one of the nine remaining (unordered) pairs of these four arcs.
  Arc K{I.to, J.from}, L{J.to, I.from};
  return AdmissibleList({Box{I, I}, Box{I, K}, Box{I, L}, Box{K, K}, Box{K, J},
                         Box{K, L}, Box{J, J}, Box{J, L}, Box{L, L}});
}

AdmissibleList intersect(const Box& a, const Box& b) {
  require_admissible(a);
  require_admissible(b);
  std::vector<Box> out;
  auto add = [&out](const std::vector<Arc>& us, const std::vector<Arc>& vs) {
    for (const Arc& u : us)
      for (const Arc& v : vs) out.push_back(Box{u, v});
  };
  bool da = arcs_equal(a.I, a.J), db = arcs_equal(b.I, b.J);
  if (da && db) {
    // Both endpoints must lie in I cap J; split the pieces into diagonal
    // and cross boxes so the list stays disjoint.
    std::vector<Arc> p = arc_intersection(a.I, b.I);
    for (std::size_t i = 0; i < p.size(); ++i) {
      out.push_back(Box{p[i], p[i]});
      for (std::size_t j = i + 1; j < p.size(); ++j) out.push_back(Box{p[i], p[j]});
    }
  } else if (da) {
    add(arc_intersection(a.I, b.I), arc_intersection(a.I, b.J));
  } else if (db) {
    add(arc_intersection(a.I, b.I), arc_intersection(a.J, b.I));
  } else {
    add(arc_intersection(a.I, b.I), arc_intersection(a.J, b.J));
    add(arc_intersection(a.I, b.J), arc_intersection(a.J, b.I));
  }
  std::vector<Box> kept;
  for (const Box& box : out)
    if (!box_empty(box)) kept.push_back(box);
  return AdmissibleList(std::move(kept));
}

CrossRatioFn liouville_fn() {
  CrossRatioFn f;
  f.family = "liouville";
  f.root_index = 1;
  f.eval = [](BoundaryPoint x, BoundaryPoint y, BoundaryPoint z, BoundaryPoint w) {
    double num = chord(x, z) * chord(y, w);
    double den = chord(x, w) * chord(y, z);
    if (den == 0.0 || num == 0.0)
      throw coincident_point_error("cross ratio of coincident boundary points");
    return std::log(num / den);
  };
  return f;
}

namespace {

template <typename Point>
const Point& registry_lookup(const std::vector<Point>& reg, BoundaryPoint p) {
  for (const Point& q : reg) {
    double d = std::abs(q.at.angle - p.angle);
    if (std::min(d, kTau - d) < 1e-9) return q;
  }
  throw insufficient_data_error("boundary point is not in the flag registry");
}

}  // namespace

CrossRatioFn hitchin_fn(std::vector<FlagPoint> registry, int i) {
  CrossRatioFn f;
  f.family = "hitchin";
  f.root_index = i;
  f.eval = [reg = std::move(registry), i](BoundaryPoint x, BoundaryPoint y,
                                          BoundaryPoint z, BoundaryPoint w) {
    return hitchin_cross_ratio(registry_lookup(reg, x), registry_lookup(reg, y),
                               registry_lookup(reg, z), registry_lookup(reg, w), i);
  };
  return f;
}

CrossRatioFn maximal_fn(std::vector<LagrangianPoint> registry) {
  CrossRatioFn f;
  f.family = "maximal";
  f.root_index = 1;
  f.eval = [reg = std::move(registry)](BoundaryPoint x, BoundaryPoint y,
                                       BoundaryPoint z, BoundaryPoint w) {
    return maximal_cross_ratio(registry_lookup(reg, x), registry_lookup(reg, y),
                               registry_lookup(reg, z), registry_lookup(reg, w));
  };
  return f;
}

void admit_cross_ratio(CrossRatioFn& B, std::vector<BoundaryPoint> seed) {
  if (seed.size() < 5)
    throw axiom_error("axiom battery needs at least five seed points");
  std::sort(seed.begin(), seed.end(),
            [](BoundaryPoint a, BoundaryPoint b) { return a.angle < b.angle; });
  const std::size_t n = seed.size();
  constexpr double tol = 1e-8;
  // Every cyclically ordered quintuple (q[0..4]) drawn from the sorted seed.
  std::vector<std::size_t> idx(5);
  auto run = [&](const std::vector<std::size_t>& ix) {
    BoundaryPoint q[5];
    for (int k = 0; k < 5; ++k) q[k] = seed[ix[static_cast<std::size_t>(k)]];
    double b0 = B.eval(q[0], q[1], q[2], q[3]);
    if (b0 <= 0.0) throw axiom_error("positivity fails on an ordered quadruple");
    double sym = B.eval(q[2], q[3], q[0], q[1]);
    if (std::abs(sym - b0) > tol * std::max(1.0, std::abs(b0)))
      throw axiom_error("symmetry residual exceeds tolerance");
    double lhs = b0 + B.eval(q[0], q[1], q[3], q[4]);
    double rhs = B.eval(q[0], q[1], q[2], q[4]);
    if (std::abs(lhs - rhs) > tol * std::max(1.0, std::abs(rhs)))
      throw axiom_error("additivity residual exceeds tolerance");
  };
  // Enumerate 5-combinations of {0..n-1} (seed sets are small).
  for (std::size_t a = 0; a + 4 < n; ++a)
    for (std::size_t b = a + 1; b + 3 < n; ++b)
      for (std::size_t c = b + 1; c + 2 < n; ++c)
        for (std::size_t d = c + 1; d + 1 < n; ++d)
          for (std::size_t e = d + 1; e < n; ++e) {
            idx = {a, b, c, d, e};
            run(idx);
          }
  B.verified = true;
}

Mass box_mass(const CrossRatioFn& B, const Box& b) {
  require_verified(B);
  require_admissible(b);
  if (box_empty(b)) return Mass{};
  if (arcs_equal(b.I, b.J)) return Mass::infinite();
  if (!arc_closures_disjoint(b.I, b.J)) return Mass::infinite();
  // Disjoint closures of ccw arcs put the endpoints in cyclic order.
  return Mass{true, B.eval(b.I.from, b.I.to, b.J.from, b.J.to)};
}

Mass list_mass(const CrossRatioFn& B, const AdmissibleList& l) {
  require_verified(B);
  if (!l.pairwise_disjoint())
    throw non_disjoint_list_error("list boxes are not pairwise disjoint");
  Mass total{};
  for (const Box& b : l.boxes()) total = total + box_mass(B, b);
  return total;
}

double period_via_boxes(const CrossRatioFn& B, const SurfaceModel& m,
                        const CyclicWord& c, BoundaryPoint z) {
  require_verified(B);
  Isometry g = evaluate(m, c.letters);
  AxisData ax = axis_data(g);
  auto gap = [](BoundaryPoint a, BoundaryPoint b) {
    double d = std::abs(a.angle - b.angle);
    return std::min(d, kTau - d);
  };
  if (gap(z, ax.attracting) < 1e-9 || gap(z, ax.repelling) < 1e-9)
    throw fixed_point_collision_error("auxiliary point is a fixed point");
  BoundaryPoint gz = apply(g, z);
  // I joins the fixed points on the side away from z; J runs from z to
  // g z on the side away from the repelling point.
  Arc I{ax.attracting, ax.repelling};
  if (arc_contains(I, z)) I = Arc{ax.repelling, ax.attracting};
  Arc J{z, gz};
  if (arc_contains(J, ax.repelling)) J = Arc{gz, z};
  Mass mass = box_mass(B, Box{I, J});
  if (!mass.finite) throw non_finite_mass_error("period box mass is infinite");
  return mass.value;
}

}  // namespace surf
