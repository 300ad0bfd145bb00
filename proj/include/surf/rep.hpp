#pragma once

#include <iosfwd>

#include "surf/geom.hpp"

namespace surf {

enum class RepFamily { SL, Sp };

// Images of the standard generators under a linear representation of the
// surface group, SL(n,R) or Sp(2n,R) (for Sp, n is the full matrix size,
// even, and the preserved form is sp_form(n/2)).
struct LinearRep {
  int n = 2;
  int genus = 2;
  RepFamily family = RepFamily::SL;
  std::vector<Eigen::MatrixXd> gens;
  // When the representation is a symmetric power or diagonal symplectic
  // embedding of a Fuchsian group, the base 2x2 generators are kept here:
  // spectra and limit flags are then computed from the 2x2 eigendata, which
  // stays well conditioned where the n-dimensional eigenproblem does not
  // (conjugates can have |A| ~ 1e9 with eigenvalues near 1e-2, putting the
  // small ones below the eps*|A| noise floor).  Empty for parsed files.
  std::vector<Eigen::Matrix2d> base_gens;
};

// The symplectic form on R^(2n) preserved by the Sp(2n,R) family:
// Omega(u,v) = u^T [[0, I],[-I, 0]] v.
Eigen::MatrixXd sp_form(int n);

// Action of g on degree-(n-1) binary forms: the n-dimensional irreducible
// representation of SL(2,R).  Multiplicative; diag(l, 1/l) maps to the
// weight ladder diag(l^(n-1), l^(n-3), ..., l^(1-n)).
Eigen::MatrixXd symmetric_power(const Eigen::Matrix2d& g, int n);

// Symmetric-power composition of the Fuchsian model: the irreducible
// representation into SL(n,R) restricted to the surface group.
LinearRep sym_power_rep(const SurfaceModel& m, int n);

// Diagonal embedding of the Fuchsian model into Sp(2n,R):
// [[a,b],[c,d]] -> [[aI, bI],[cI, dI]] on R^2 (x) R^n.
LinearRep sp_diagonal_rep(const SurfaceModel& m, int n);

// Relator image, unit determinant and (for Sp) form preservation; throws
// construction errors on violation.
void validate_rep(const LinearRep& r);

// Plain-text exchange format: header "n <n> family <SL|Sp> genus <g>",
// then 2g matrices row-major, whitespace separated.  Strict parse.
LinearRep parse_rep(std::istream& in, int expected_genus);
void write_rep(std::ostream& out, const LinearRep& r);

Eigen::MatrixXd evaluate(const LinearRep& r, const Word& w);

// Eigenvalue log-moduli of g sorted in decreasing order, with matching
// real eigenvector columns where the eigenvalue is real.
struct Spectrum {
  Eigen::VectorXd log_mod;   // size n, decreasing
  Eigen::MatrixXd vectors;   // column k: unit eigenvector (NaN column if complex)
  std::vector<bool> real_ev; // whether eigenvalue k is real
};
Spectrum eigen_spectrum(const Eigen::MatrixXd& g);

// Full eigen-flag: columns ordered by strictly decreasing eigenvalue
// modulus.  Throws spectrum-degenerate if moduli are not separated
// (relative gap 1e-10) or eigenvalues are not real.
Eigen::MatrixXd eigen_flag(const Eigen::MatrixXd& g);

// Root-alpha_i length: sum of the top i eigenvalue log-moduli of the image
// of gamma minus the sum of the bottom i.  Requires relative modulus gaps
// at positions i|i+1 and n-i|n-i+1.
double length_alpha(const LinearRep& r, const CyclicWord& c, int i);

// A boundary point of the group carrying the flag of the representation's
// limit curve at that point (evaluated at fixed points of group elements
// and their translates).
struct FlagPoint {
  BoundaryPoint at;      // position on the circle, from the Fuchsian model
  Eigen::MatrixXd flag;  // n columns; flag^{(i)} = span of the first i
};

// Limit-curve flag at the attracting (or repelling) fixed point of gamma.
FlagPoint fixed_flag(const SurfaceModel& m, const LinearRep& r, const Word& gamma,
                     bool attracting);

// Equivariance: the flag point at g.x.
FlagPoint translate_flag(const SurfaceModel& m, const LinearRep& r, const Word& g,
                         const FlagPoint& p);

// log | (F_x^(n-i) ^ F_z^(i)) (F_y^(n-i) ^ F_w^(i)) /
//       (F_x^(n-i) ^ F_w^(i)) (F_y^(n-i) ^ F_z^(i)) |
// where ^ stacks flag columns into an n x n determinant.
double wedge_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                   const FlagPoint& w, int i);

// Symmetrized positive cross ratio of the flag family:
// (wedge_ratio(i) + wedge_ratio(n-i)) / 2.
double hitchin_cross_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                           const FlagPoint& w, int i);

// Projective (line/hyperplane) four-point function
// <x_hyp, y_line><z_hyp, w_line> / (<x_hyp, w_line><z_hyp, y_line>);
// multiplicative cocycle, not itself additive.
double labourie_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                      const FlagPoint& w);

// The additive cross ratio (1/2) log(labourie_ratio(x,z,y,w) *
// labourie_ratio(z,x,w,y)); its period is log|l_1| - log|l_n|.
double labourie_cross_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                            const FlagPoint& w);

// A boundary point carrying a Lagrangian subspace of R^(2n).
struct LagrangianPoint {
  BoundaryPoint at;
  Eigen::MatrixXd basis;  // 2n x n, Omega-isotropic columns
};

// Invariant Lagrangian of the image of gamma under an Sp representation
// (the span of the top-half eigenvalue moduli eigenvectors).
LagrangianPoint fixed_lagrangian(const SurfaceModel& m, const LinearRep& r,
                                 const Word& gamma, bool attracting);

LagrangianPoint translate_lagrangian(const SurfaceModel& m, const LinearRep& r,
                                     const Word& g, const LagrangianPoint& p);

// log |det O(x,z) det O(y,w) / (det O(x,w) det O(y,z))| with
// O(p,q)_{k,m} = Omega(p_k, q_m); the positive cross ratio of the maximal
// family.  Basis-independent; throws on non-Lagrangian or non-transverse
// input.
double maximal_cross_ratio(const LagrangianPoint& x, const LagrangianPoint& y,
                           const LagrangianPoint& z, const LagrangianPoint& w);

}  // namespace surf
