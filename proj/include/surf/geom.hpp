#pragma once

#include <Eigen/Dense>

#include "surf/words.hpp"

namespace surf {

// Orientation-preserving isometry of the hyperbolic plane: a real 2x2
// matrix with det = 1, considered modulo sign.
struct Isometry {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();

  Isometry() = default;
  explicit Isometry(const Eigen::Matrix2d& M);  // normalizes det to 1

  double trace_mag() const { return std::abs(m(0, 0) + m(1, 1)); }
  bool hyperbolic() const { return trace_mag() > 2.0 + 1e-12; }
  Isometry inverse() const;
  Isometry operator*(const Isometry& o) const;
  bool approx_equal_mod_sign(const Isometry& o, double tol) const;
};

// A point of the circle at infinity, stored as an angle in [0, 2pi).
struct BoundaryPoint {
  double angle = 0.0;
};

BoundaryPoint normalize_angle(double a);

struct SurfaceModel {
  int genus = 0;
  std::vector<Isometry> gens;  // a1, b1, a2, b2, ... (letters 1..2g)
  // Side-pairing maps of the fundamental polygon (Dirichlet domain of the
  // disk origin) and their expressions in the standard generators.  Used
  // for ball enumeration and point folding; equal to gens for genus >= 3.
  std::vector<Isometry> pairings;
  std::vector<Word> pairing_words;
  double polygon_radius = 0.0;  // circumradius of the fundamental polygon
};

// Regular-4g-gon side-pairing uniformization; genus 2 is the square-octagon
// model whose four generators all realize the systole 2*arccosh(1+sqrt 2).
SurfaceModel build_model(int genus);

Isometry evaluate(const SurfaceModel& m, const Word& w);

struct AxisData {
  BoundaryPoint attracting;
  BoundaryPoint repelling;
  double length = 0.0;
};

// Fixed points and translation length of a hyperbolic isometry.
// Throws non-hyperbolic error when |trace| <= 2 + 1e-12.
AxisData axis_data(const Isometry& g);

// Image of a boundary point under the induced circle map.
BoundaryPoint apply(const Isometry& g, BoundaryPoint p);

// Whether the chord {x,y} separates z from w on the circle (strict linking).
// Throws coincident-point error when any two arguments collide.
bool linked(BoundaryPoint x, BoundaryPoint y, BoundaryPoint z, BoundaryPoint w);

// --- hyperboloid-model primitives (signature +,+,-) --------------------

using Vec3 = Eigen::Vector3d;

inline double mink(const Vec3& u, const Vec3& v) {
  return u[0] * v[0] + u[1] * v[1] - u[2] * v[2];
}

// Light-cone vector of a boundary angle, scaled so the last coordinate is 1.
Vec3 boundary_vec(BoundaryPoint p);

// Base point of the model (the disk origin).
Vec3 base_point();

// Spacelike normal of the geodesic joining two boundary points.
Vec3 geodesic_normal(BoundaryPoint a, BoundaryPoint b);

// Signed side of a (point or light-cone) vector w.r.t. a geodesic normal,
// with a relative zero guard.
int side_sign(const Vec3& p, const Vec3& normal);

// Intersection point of two geodesics given by normals; throws a
// transversality error if they do not cross inside the plane.
Vec3 crossing_point(const Vec3& n1, const Vec3& n2);

// The SO(2,1) matrix acting on hyperboloid vectors as g does on the plane.
Eigen::Matrix3d so21(const Isometry& g);

// Distance between two normalized timelike vectors.
double hyp_distance(const Vec3& p, const Vec3& q);

// Normalize a timelike vector to the hyperboloid sheet (last coord > 0).
Vec3 normalize_timelike(const Vec3& p);

// Half-open boundary arc [from, to), running counterclockwise.
struct Arc {
  BoundaryPoint from, to;
};

// Liouville measure of the set of geodesics with one endpoint in I and the
// other in J: the log cross ratio of the four endpoints.  Returns +infinity
// when the arc closures share an endpoint; throws when they overlap.
double liouville_box_mass(const Arc& I, const Arc& J);

}  // namespace surf
