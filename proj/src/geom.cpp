#include "surf/geom.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace surf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * std::numbers::pi;

using cd = std::complex<double>;

// Disk-model isometry [[alpha, beta], [conj beta, conj alpha]] in SU(1,1).
struct DiskIso {
  cd a{1.0, 0.0}, b{0.0, 0.0};

  DiskIso mul(const DiskIso& o) const {
    return {a * o.a + b * std::conj(o.b), a * o.b + b * std::conj(o.a)};
  }
  DiskIso inv() const { return {std::conj(a), -b}; }
  cd mobius(cd z) const { return (a * z + b) / (std::conj(b) * z + std::conj(a)); }
};

DiskIso translate_to(cd p) {
  double n = 1.0 / std::sqrt(1.0 - std::norm(p));
  return {cd(n, 0.0), n * p};
}

DiskIso rotation(double phi) { return {std::polar(1.0, phi / 2.0), cd(0.0, 0.0)}; }

// The unique isometry sending the oriented geodesic segment (p,q) to
// (p2,q2) with p -> p2 (and q -> q2 when the distances agree).
DiskIso iso_pair(cd p, cd q, cd p2, cd q2) {
  DiskIso tp = translate_to(p), tp2 = translate_to(p2);
  cd w = tp.inv().mobius(q);
  cd w2 = tp2.inv().mobius(q2);
  return tp2.mul(rotation(std::arg(w2) - std::arg(w))).mul(tp.inv());
}

// Conjugate a disk isometry to the real upper-half-plane form.
Isometry to_real(const DiskIso& d) {
  Eigen::Matrix2cd M, Phi, PhiInv;
  M << d.a, d.b, std::conj(d.b), std::conj(d.a);
  Phi << cd(1, 0), cd(0, -1), cd(1, 0), cd(0, 1);
  PhiInv = Phi.inverse();
  Eigen::Matrix2cd R = PhiInv * M * Phi;
  Eigen::Matrix2d out = R.real();
  return Isometry(out);
}

void check_relator(const SurfaceModel& m, const GroupPresentation& P) {
  Isometry r = evaluate(m, P.relator());
  Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  double res = std::min((r.m - I).cwiseAbs().maxCoeff(), (r.m + I).cwiseAbs().maxCoeff());
  if (res > 1e-9) throw construction_error("relator residual " + std::to_string(res));
  for (const Isometry& g : m.gens)
    if (!g.hyperbolic()) throw construction_error("non-hyperbolic generator");
}

SurfaceModel build_genus2() {
  // Opposite-side pairing of the regular octagon; all side-pairing maps
  // share trace 2 + 2*sqrt(2) and realize the systole.
  const double al = 1.0 + std::sqrt(2.0);
  const double be = std::sqrt(2.0 + 2.0 * std::sqrt(2.0));
  auto side = [&](int k) { return DiskIso{cd(al, 0.0), be * std::polar(1.0, (k + 1) * kPi / 4.0)}; };
  DiskIso g0 = side(0), g1 = side(1), g2 = side(2), g3 = side(3);
  DiskIso a1 = g0;
  DiskIso b1 = g1;
  DiskIso a2 = g1.mul(g2.inv()).mul(g0.inv());
  DiskIso b2 = g0.mul(g2).mul(g3.inv()).mul(g0.inv());
  SurfaceModel m;
  m.genus = 2;
  for (const DiskIso& d : {a1, b1, a2, b2}) m.gens.push_back(to_real(d));
  // The octagon pairings expressed in the generators: g0 = a1, g1 = b1,
  // g2 = a1^-1 a2^-1 b1, g3 = a1^-1 b2^-1 a2^-1 b1.
  for (const DiskIso& d : {g0, g1, g2, g3}) m.pairings.push_back(to_real(d));
  m.pairing_words = {parse_word("a1", 2), parse_word("b1", 2), parse_word("A1A2b1", 2),
                     parse_word("A1B2A2b1", 2)};
  m.polygon_radius = std::acosh(3.0 + 2.0 * std::sqrt(2.0));
  return m;
}

SurfaceModel build_polygon(int genus) {
  const int n = 4 * genus;
  // Circumradius of the regular 4g-gon with vertex angle 2pi/4g, from the
  // hyperbolic right triangle with angles pi/4g, pi/4g at center and vertex.
  double cotv = 1.0 / std::tan(kPi / n);
  double Rv = std::acosh(cotv * cotv);
  double rv = std::tanh(Rv / 2.0);  // Euclidean vertex radius in the disk
  std::vector<cd> v(n);
  for (int k = 0; k < n; ++k) v[k] = rv * std::polar(1.0, (2 * k + 1) * kPi / n);
  auto vert = [&](int k) { return v[((k % n) + n) % n]; };

  SurfaceModel m;
  m.genus = genus;
  for (int j = 0; j < genus; ++j) {
    int px = 4 * j, mx = 4 * j + 2;    // sides paired by the j-th "a" map
    int py = 4 * j + 1, my = 4 * j + 3;  // sides paired by the j-th "b" map
    DiskIso x = iso_pair(vert(mx), vert(mx + 1), vert(px + 1), vert(px));
    DiskIso y = iso_pair(vert(my), vert(my + 1), vert(py + 1), vert(py));
    m.gens.push_back(to_real(x));
    m.gens.push_back(to_real(y.inv()));
    m.pairings.push_back(m.gens[m.gens.size() - 2]);
    m.pairings.push_back(m.gens.back());
    m.pairing_words.push_back(Word{static_cast<Letter>(2 * j + 1)});
    m.pairing_words.push_back(Word{static_cast<Letter>(2 * j + 2)});
  }
  m.polygon_radius = Rv;
  return m;
}

}  // namespace

Isometry::Isometry(const Eigen::Matrix2d& M) : m(M) {
  double d = m.determinant();
  if (!(d > 0.0)) throw construction_error("matrix determinant not positive");
  m /= std::sqrt(d);
}

Isometry Isometry::inverse() const {
  Eigen::Matrix2d r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  Isometry out;
  out.m = r;
  return out;
}

Isometry Isometry::operator*(const Isometry& o) const {
  Isometry out;
  out.m = m * o.m;
  return out;
}

bool Isometry::approx_equal_mod_sign(const Isometry& o, double tol) const {
  double scale = std::max(1.0, std::max(m.cwiseAbs().maxCoeff(), o.m.cwiseAbs().maxCoeff()));
  return (m - o.m).cwiseAbs().maxCoeff() <= tol * scale ||
         (m + o.m).cwiseAbs().maxCoeff() <= tol * scale;
}

BoundaryPoint normalize_angle(double a) {
  a = std::fmod(a, kTau);
  if (a < 0) a += kTau;
  if (a >= kTau) a = 0.0;
  return BoundaryPoint{a};
}

SurfaceModel build_model(int genus) {
  if (genus < 2) throw construction_error("genus must be >= 2");
  SurfaceModel m = (genus == 2) ? build_genus2() : build_polygon(genus);
  check_relator(m, GroupPresentation(genus));
  return m;
}

Isometry evaluate(const SurfaceModel& m, const Word& w) {
  Isometry out;
  for (Letter l : w) {
    int a = l > 0 ? l : -l;
    if (a < 1 || a > 2 * m.genus) throw construction_error("letter outside alphabet");
    out = out * (l > 0 ? m.gens[a - 1] : m.gens[a - 1].inverse());
  }
  return out;
}

namespace {

// Projective eigendirection (v1, v2) -> circle angle.  The double cover
// psi -> -2 psi identifies RP^1 with the boundary circle compatibly with
// the Cayley transform used for the disk construction.
BoundaryPoint dir_to_angle(double v1, double v2) {
  return normalize_angle(std::atan2(-2.0 * v1 * v2, v1 * v1 - v2 * v2));
}

}  // namespace

AxisData axis_data(const Isometry& g) {
  double t = g.m(0, 0) + g.m(1, 1);
  if (std::abs(t) <= 2.0 + 1e-12) throw non_hyperbolic_error("|trace| <= 2");
  Eigen::Matrix2d M = (t < 0) ? Eigen::Matrix2d(-g.m) : g.m;
  t = std::abs(t);
  double s = std::sqrt(t * t - 4.0);
  double lp = (t + s) / 2.0, lm = 1.0 / lp;  // avoids cancellation in t - s
  (void)lm;
  auto eigdir = [](const Eigen::Matrix2d& A, double lam) {
    // (A - lam) v = 0: take the larger of the two row-kernel candidates.
    double n1 = std::hypot(A(0, 1), lam - A(0, 0));
    double n2 = std::hypot(lam - A(1, 1), A(1, 0));
    if (n1 >= n2) return dir_to_angle(A(0, 1), lam - A(0, 0));
    return dir_to_angle(lam - A(1, 1), A(1, 0));
  };
  AxisData out;
  out.attracting = eigdir(M, lp);
  // The repelling direction is the dominant eigendirection of the inverse;
  // computing it there avoids the ill-conditioned small eigenvalue.
  Eigen::Matrix2d Mi;
  Mi << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
  out.repelling = eigdir(Mi, lp);
  out.length = 2.0 * std::acosh(t / 2.0);
  return out;
}

BoundaryPoint apply(const Isometry& g, BoundaryPoint p) {
  double psi = -p.angle / 2.0;
  double v1 = std::cos(psi), v2 = std::sin(psi);
  double w1 = g.m(0, 0) * v1 + g.m(0, 1) * v2;
  double w2 = g.m(1, 0) * v1 + g.m(1, 1) * v2;
  return dir_to_angle(w1, w2);
}

namespace {

int orient(BoundaryPoint a, BoundaryPoint b, BoundaryPoint c) {
  double ax = std::cos(a.angle), ay = std::sin(a.angle);
  double bx = std::cos(b.angle), by = std::sin(b.angle);
  double cx = std::cos(c.angle), cy = std::sin(c.angle);
  double det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  // Relative guard: det over the chord-length product is the sine of the
  // chord angle, which stays O(arc gap) even for tightly clustered points.
  double scale = std::hypot(bx - ax, by - ay) * std::hypot(cx - ax, cy - ay);
  if (std::abs(det) <= 1e-12 * std::max(scale, 1e-300)) return 0;
  return det > 0 ? 1 : -1;
}

}  // namespace

bool linked(BoundaryPoint x, BoundaryPoint y, BoundaryPoint z, BoundaryPoint w) {
  BoundaryPoint pts[4] = {x, y, z, w};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      double d = std::abs(pts[i].angle - pts[j].angle);
      d = std::min(d, kTau - d);
      if (d <= 1e-12) throw coincident_point_error("boundary points collide");
    }
  int o1 = orient(x, y, z), o2 = orient(x, y, w);
  return o1 != 0 && o2 != 0 && o1 != o2;
}

Vec3 boundary_vec(BoundaryPoint p) {
  return Vec3(std::cos(p.angle), std::sin(p.angle), 1.0);
}

Vec3 base_point() { return Vec3(0.0, 0.0, 1.0); }

Vec3 geodesic_normal(BoundaryPoint a, BoundaryPoint b) {
  Vec3 u = boundary_vec(a), v = boundary_vec(b);
  Vec3 e = u.cross(v);
  Vec3 n(e[0], e[1], -e[2]);
  double norm2 = mink(n, n);
  if (norm2 <= 1e-24) throw coincident_point_error("degenerate geodesic");
  return n / std::sqrt(norm2);
}

int side_sign(const Vec3& p, const Vec3& n) {
  double s = mink(p, n);
  double scale = p.cwiseAbs().maxCoeff() * n.cwiseAbs().maxCoeff();
  if (std::abs(s) <= 1e-12 * std::max(1.0, scale)) return 0;
  return s > 0 ? 1 : -1;
}

Vec3 crossing_point(const Vec3& n1, const Vec3& n2) {
  Vec3 e = n1.cross(n2);
  Vec3 x(e[0], e[1], -e[2]);
  double q = mink(x, x);
  if (q >= -1e-18) throw transversality_error("geodesics do not cross");
  x /= std::sqrt(-q);
  if (x[2] < 0) x = -x;
  return x;
}

Eigen::Matrix3d so21(const Isometry& g) {
  // Action on point matrices [[Z+X, Yr], [Yr, Z-X]] by congruence, then the
  // Y-axis flip matching the boundary-angle convention.
  const Eigen::Matrix2d& M = g.m;
  auto congr = [&](double X, double Yr, double Z) {
    Eigen::Matrix2d A;
    A << Z + X, Yr, Yr, Z - X;
    Eigen::Matrix2d B = M * A * M.transpose();
    double Yo = B(0, 1);
    double Xo = (B(0, 0) - B(1, 1)) / 2.0;
    double Zo = (B(0, 0) + B(1, 1)) / 2.0;
    return Vec3(Xo, Yo, Zo);
  };
  Eigen::Matrix3d R;
  R.col(0) = congr(1, 0, 0);
  R.col(1) = congr(0, 1, 0);
  R.col(2) = congr(0, 0, 1);
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
  F(1, 1) = -1.0;
  return F * R * F;
}

double hyp_distance(const Vec3& p, const Vec3& q) {
  double c = -mink(p, q);
  return std::acosh(std::max(1.0, c));
}

namespace {

// Projective direction of a boundary angle (inverse of dir_to_angle).
inline void angle_to_dir(BoundaryPoint p, double& v1, double& v2) {
  v1 = std::cos(p.angle / 2.0);
  v2 = -std::sin(p.angle / 2.0);
}

inline double wedge(BoundaryPoint p, BoundaryPoint q) {
  double p1, p2, q1, q2;
  angle_to_dir(p, p1, p2);
  angle_to_dir(q, q1, q2);
  return p1 * q2 - p2 * q1;
}

inline double circ_gap(BoundaryPoint a, BoundaryPoint b) {
  double d = std::abs(a.angle - b.angle);
  return std::min(d, kTau - d);
}

}  // namespace

double liouville_box_mass(const Arc& I, const Arc& J) {
  BoundaryPoint x = I.from, y = I.to, z = J.from, w = J.to;
  constexpr double tol = 1e-12;
  // Closures touching in a single point carry infinite mass.
  if (circ_gap(y, z) <= tol || circ_gap(w, x) <= tol)
    return std::numeric_limits<double>::infinity();
  // Degenerate arcs carry no mass.
  if (circ_gap(x, y) <= tol || circ_gap(z, w) <= tol) return 0.0;
  auto rel = [&](BoundaryPoint p) {
    double a = p.angle - x.angle;
    return normalize_angle(a).angle;
  };
  double ay = rel(y), az = rel(z), aw = rel(w);
  if (!(ay < az && az < aw)) throw non_disjoint_list_error("arcs are not disjoint");
  double num = wedge(x, z) * wedge(y, w);
  double den = wedge(x, w) * wedge(y, z);
  return std::log(std::abs(num / den));
}

Vec3 normalize_timelike(const Vec3& p) {
  double q = mink(p, p);
  if (q >= -1e-18) throw construction_error("vector is not timelike");
  Vec3 x = p / std::sqrt(-q);
  if (x[2] < 0) x = -x;
  return x;
}

}  // namespace surf
