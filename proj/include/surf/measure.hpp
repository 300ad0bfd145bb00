#pragma once

#include <functional>
#include <string>

#include "surf/rep.hpp"

namespace surf {

// --- boundary arc algebra -----------------------------------------------
//
// Arcs are the half-open counterclockwise intervals [from, to) of geom.hpp;
// from == to denotes the empty arc.  All predicates treat arcs as point
// sets on the circle.

bool arc_empty(const Arc& a);
double arc_extent(const Arc& a);  // ccw length in [0, 2pi)
bool arc_contains(const Arc& a, BoundaryPoint p);
bool arcs_equal(const Arc& a, const Arc& b);
bool arcs_disjoint(const Arc& a, const Arc& b);
bool arc_closures_disjoint(const Arc& a, const Arc& b);

// Intersection of two arcs: zero, one or two arcs.
std::vector<Arc> arc_intersection(const Arc& a, const Arc& b);

// The set of geodesics of the universal cover with one endpoint in each
// arc (both endpoints in I when I = J).  Admissible when I = J or the
// arcs are disjoint.
struct Box {
  Arc I, J;
};

bool box_admissible(const Box& b);
bool box_empty(const Box& b);
bool box_contains(const Box& b, BoundaryPoint a, BoundaryPoint p);
bool boxes_disjoint(const Box& a, const Box& b);

// A finite list of admissible boxes; its geodesic set is the union.  The
// pairwise-disjointness flag is computed once and cached, since masses
// are only defined over disjoint decompositions.
class AdmissibleList {
 public:
  AdmissibleList() = default;
  explicit AdmissibleList(std::vector<Box> boxes);  // validates admissibility

  const std::vector<Box>& boxes() const { return boxes_; }
  bool pairwise_disjoint() const;

 private:
  std::vector<Box> boxes_;
  mutable int disjoint_ = -1;  // -1 unknown, else 0/1
};

bool list_contains(const AdmissibleList& l, BoundaryPoint a, BoundaryPoint b);

// Complement of a box's geodesic set as a disjoint admissible list: the
// nine-box decomposition for disjoint arcs, two boxes when I = J.
AdmissibleList complement(const Box& b);

// Intersection of two boxes' geodesic sets as a disjoint admissible list
// of at most eight boxes.
AdmissibleList intersect(const Box& a, const Box& b);

// --- the premeasure built from a positive cross ratio --------------------

// Mass of a geodesic set: a nonnegative value or a tagged +infinity.
// Infinity never enters float arithmetic; addition short-circuits.
struct Mass {
  bool finite = true;
  double value = 0.0;

  static Mass infinite() { return {false, 0.0}; }
  Mass operator+(const Mass& o) const {
    if (!finite || !o.finite) return infinite();
    return {true, value + o.value};
  }
};

// A four-point cross-ratio evaluator with its provenance.  Evaluators are
// admitted into measure computations only after passing the axiom battery
// (symmetry, additivity, positivity) on a seed set of boundary points.
struct CrossRatioFn {
  std::function<double(BoundaryPoint, BoundaryPoint, BoundaryPoint, BoundaryPoint)>
      eval;
  std::string family;
  int root_index = 1;
  bool verified = false;
};

// The hyperbolic (Liouville) cross ratio: log of the classical four-point
// cross ratio of boundary angles.
CrossRatioFn liouville_fn();

// Flag-family evaluators over a finite registry of flagged points (flags
// are only computable at fixed points of group elements and their
// translates); queried points must match a registry entry to 1e-9.
CrossRatioFn hitchin_fn(std::vector<FlagPoint> registry, int i);
CrossRatioFn maximal_fn(std::vector<LagrangianPoint> registry);

// Runs the cross-ratio axiom battery on every cyclically ordered quintuple
// of the seed points (at least five required): symmetry and additivity to
// 1e-8, positivity on ordered quadruples.  Marks the evaluator verified;
// throws axiom-unverified on any violation.
void admit_cross_ratio(CrossRatioFn& B, std::vector<BoundaryPoint> seed);

// nu_B of one box: 0 for empty arcs, +infinity when I = J or the closures
// touch, else B evaluated on the four endpoints in cyclic order.
Mass box_mass(const CrossRatioFn& B, const Box& b);

// Sum of box masses over a pairwise disjoint list.
Mass list_mass(const CrossRatioFn& B, const AdmissibleList& l);

// The period of c recovered from a box: the mass of geodesics joining
// [gamma+, gamma-)_z to [z, gamma z)_{gamma-}, which equals the B-length
// B(gamma-, gamma+, gamma z, z) for any non-fixed z.
double period_via_boxes(const CrossRatioFn& B, const SurfaceModel& m,
                        const CyclicWord& c, BoundaryPoint z);

}  // namespace surf
