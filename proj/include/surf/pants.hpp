#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "surf/intersect.hpp"

namespace surf {

// One boundary of a pair of pants: the boundary element (the pant lies on
// its left), its pants-curve index, and the conjugacy witness
//   element = conjugator * curve^sign * conjugator^-1.
struct PantSlot {
  Word element;
  int curve = 0;
  int sign = 1;
  Word conjugator;
};

// Boundary triple of one pair of pants, oriented so the pant lies on the
// left of every slot; the elements satisfy slot2 * slot1 * slot0 = id.
struct PantTriple {
  std::array<PantSlot, 3> slots;
};

class PantsDecomposition {
 public:
  PantsDecomposition() = default;
  PantsDecomposition(int genus, std::vector<CyclicWord> curves,
                     std::vector<PantTriple> pants);

  int genus() const { return genus_; }
  const std::vector<CyclicWord>& curves() const { return curves_; }
  const std::vector<PantTriple>& pants() const { return pants_; }

 private:
  int genus_ = 0;
  std::vector<CyclicWord> curves_;
  std::vector<PantTriple> pants_;
};

using LengthFn = std::function<double(const CyclicWord&)>;

// Greedy decomposition: each successive curve is a simple class of minimal
// length among pool members disjoint from and distinct from the previous
// choices (an interior systole of the complement, restricted to the pool);
// ties break by canonical-word order.  The pool is the class enumeration up
// to pool_max_len; throws budget-exhausted when no admissible class remains.
PantsDecomposition minimal_pants(const IntersectionEngine& engine,
                                 const LengthFn& length, int pool_max_len);

// Ideal-triangulation edge: a Q-edge joins the repelling fixed points of
// two boundary elements of one pant; a P-edge is a pants-curve axis.
struct TriEdge {
  enum class Kind { P, Q };
  Kind kind = Kind::Q;
  Word u, v;                       // Q: endpoints u^-, v^-; P: axis of u (= v)
  int pant = -1;                   // owning pant (Q only)
  std::array<int, 2> slots{0, 0};  // slot indices of u, v in the pant (Q only)
  int curve = -1;                  // pants-curve index (P only)
};

struct Triangulation {
  std::vector<TriEdge> qedges;  // three per pant, grouped by pant
  std::vector<TriEdge> pedges;  // one per pants curve
};

// Throws relation-violation if a boundary triple does not multiply to the
// identity in the group.
Triangulation build_triangulation(const SurfaceModel& model,
                                  const PantsDecomposition& pd);

// Spiral data of an oriented pants curve: the mass-minimizing transversal
// segment [p+, p-] between the two link fans of the curve's fixed points,
// and the two non-crossing spiral geodesics {x+,x-}, {y+,y-} through its
// endpoints.  Segment masses use the Liouville stand-in (hyperbolic length).
struct SpiralData {
  int curve = 0;
  Vec3 p_plus, p_minus;         // minimizing orbit points (hyperboloid model)
  int n_plus = 0, n_minus = 0;  // chosen orbit indices
  std::array<std::array<BoundaryPoint, 2>, 2> r1;  // {x+,x-}, {y+,y-}
  double segment_mass = 0.0;    // hyperbolic length of [p+, p-]
};

struct PsiTuple {
  int a = 0, b = 0, c = 0;  // q-edge ids: predecessor, crossed edge, successor
  char type = 'Z';
  long long t1 = 0;
  bool operator==(const PsiTuple&) const = default;
};

// Cyclic tuple sequence encoding a class; empty exactly when the axis is a
// pants-curve axis.
struct PsiCode {
  std::vector<PsiTuple> tuples;
  bool operator==(const PsiCode&) const = default;
};

// Lexicographically minimal rotation, and a printable comparison key.
PsiCode canonical_code(const PsiCode& code);
std::string code_key(const PsiCode& code);

struct PsiStats {
  int p = 0;                // crossings with the pants curves, one period
  int b = 0;                // binodal edges, one period
  long long w1 = 0, w2 = 0; // spiral-edge / transversal-segment windings
};

// Segment-level data for the length-inequality checks.
struct WindingSegment {
  double t_lo = 0, t_hi = 0;  // axis parameters of the collar segment
  long long w2 = 0;           // transversal-segment crossings of the pair
  double curve_length = 0;    // translation length of the collar curve
};
struct PsiDetail {
  double ell = 0;                         // period length of the axis
  std::vector<double> pants_crossings;    // sorted axis parameters, one period
  std::vector<double> binodal_crossings;  // sorted axis parameters, one period
  std::vector<WindingSegment> windings;   // one per consecutive binodal pair
};

class PantsComplex {
 public:
  PantsComplex(const IntersectionEngine& engine, PantsDecomposition pd);
  ~PantsComplex();
  PantsComplex(const PantsComplex&) = delete;
  PantsComplex& operator=(const PantsComplex&) = delete;

  const PantsDecomposition& pants() const;
  const Triangulation& triangulation() const;
  const SpiralData& spiral(int curve) const;

  bool is_pants_multiple(const CyclicWord& c) const;

  PsiCode psi(const CyclicWord& c) const;
  PsiCode psi(const CyclicWord& c, PsiStats& stats, PsiDetail* detail = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// True iff every cyclically consecutive tuple transition takes one of the
// four admissible forms (two rotations within the pant, two starred
// pant-crossing forms); on false, fills `reason` when given.
bool validate_admissible(const PantsComplex& pc, const PsiCode& code,
                         std::string* reason = nullptr);

// The (a,b,c,T) state alphabet of admissible sequences and the exact
// four-successor transition relation (winding numbers stripped).
struct PsiState {
  int a = 0, b = 0, c = 0;
  char type = 'Z';
  bool operator==(const PsiState&) const = default;
};
std::vector<PsiState> psi_states(const PantsComplex& pc);
std::array<PsiState, 4> psi_successors(const PantsComplex& pc, const PsiState& s);

// Exact number of admissible cyclic sequences of length i, counted up to
// rotation by big-integer transfer-matrix arithmetic (single tuples are
// counted without the wrap-around constraint), paired with the bound
// (24g-24+12n) * 4^{i-1} / i.
struct AdmissibleCount {
  std::string exact;            // decimal
  std::string bound_numerator;  // (24g-24+12n) * 4^{i-1}
  int bound_denominator = 1;    // i
  bool within_bound = false;    // exact * i <= numerator
};
AdmissibleCount count_admissible(const PantsComplex& pc, int i);

}  // namespace surf
