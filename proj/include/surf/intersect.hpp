#pragma once

#include <array>
#include <memory>

#include "surf/geom.hpp"

namespace surf {

// A representative self-intersection of a closed geodesic: the axis of the
// class crosses the axis of conjugator * gamma * conjugator^-1 at `point`.
struct Crossing {
  Word conjugator;            // in standard generators
  Eigen::Vector2d point;      // crossing point in the unit disk
  double parameter = 0.0;     // position along one period of the axis, in [0,1)
};

// Geometric intersection machinery: counts lifts of one closed geodesic
// crossing a fundamental segment of another's axis, using per-class sets of
// lifts near the base point and a folding of the segment into the
// fundamental polygon.  All queries are deterministic.
class IntersectionEngine {
 public:
  explicit IntersectionEngine(SurfaceModel model);
  ~IntersectionEngine();

  IntersectionEngine(const IntersectionEngine&) = delete;
  IntersectionEngine& operator=(const IntersectionEngine&) = delete;

  const SurfaceModel& model() const;
  const GroupPresentation& presentation() const;

  // Classical geometric intersection number; symmetric.  For equal classes
  // this counts ordered strand pairs, i.e. twice the self-intersection
  // number.  Throws a saturation error if the lift enumeration radius check
  // fails to stabilize.
  int geometric_intersection(const CyclicWord& c, const CyclicWord& d) const;

  // One entry per unordered pair of crossing strands; the list length is
  // the geometric self-intersection number.  Requires c primitive.
  std::vector<Crossing> self_intersections(const CyclicWord& c) const;

  // Factorization gamma = gamma3 * gamma2 at a crossing, with
  // gamma2 * p in (p, gamma * p] on the axis; returns ([[gamma3^-1 gamma2]],
  // [[gamma2]], [[gamma3]]).
  std::array<CyclicWord, 3> surgery_split(const CyclicWord& c, const Crossing& x) const;

  // Independent combinatorial count: linked rotation pairs of the two
  // cyclic words, decided on the axis endpoints of each rotation.
  int linked_pairs_count(const CyclicWord& c, const CyclicWord& d) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace surf
