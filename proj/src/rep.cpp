#include "surf/rep.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace surf {

namespace {

constexpr double kGapTol = 1e-10;          // relative eigenvalue-modulus gap
constexpr long double kWedgeTol = 1e-14L;  // degenerate determinant cutoff

// Determinants of stacked flag columns scale like a high power of the
// angular separation of the points, so they are evaluated in extended
// precision to keep the relative error of near-coincident configurations
// within the cross-ratio tolerances.
using MatrixXl = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using Matrix2l = Eigen::Matrix<long double, 2, 2>;
using Vector2l = Eigen::Matrix<long double, 2, 1>;

// Orthonormalize the columns keeping every leading span fixed (the basis
// change is upper triangular, so it cancels in all the determinant ratios),
// with a deterministic sign convention.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> orthonormalize_nested(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& F) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::HouseholderQR<Mat> qr(F);
  Mat Q = qr.householderQ() * Mat::Identity(F.rows(), F.cols());
  for (Eigen::Index j = 0; j < F.cols(); ++j) {
    Eigen::Index bi;
    Q.col(j).cwiseAbs().maxCoeff(&bi);
    if (Q(bi, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

bool has_base(const LinearRep& r) { return !r.base_gens.empty(); }

// The base 2x2 pipeline runs in extended precision: flag entries divided by
// near-vanishing stacked determinants make every spared digit count.
Matrix2l base_evaluate(const LinearRep& r, const Word& w) {
  Matrix2l M = Matrix2l::Identity();
  for (Letter l : w) {
    Matrix2l G = r.base_gens[static_cast<std::size_t>(std::abs(l) - 1)].cast<long double>();
    M = l > 0 ? (M * G).eval() : (M * G.inverse()).eval();
  }
  return M;
}

// Analytic eigendata of a hyperbolic 2x2: log of the larger eigenvalue
// modulus and the unit eigenvectors for the larger/smaller one.
struct BaseEigen {
  long double log_top = 0.0L;
  Vector2l v_top, v_bot;
};

BaseEigen base_eigen(const Matrix2l& P) {
  long double t = P.trace();
  if (std::abs(t) <= 2.0L + 1e-12L)
    throw spectrum_degenerate_error("base element is not hyperbolic");
  long double s = std::sqrt(t * t - 4.0L);
  long double l_top = (t > 0 ? t + s : t - s) / 2.0L;
  long double l_bot = P.determinant() / l_top;  // avoids the cancelling branch
  BaseEigen e;
  e.log_top = std::log(std::abs(l_top));
  auto vec = [&](long double l) {
    Vector2l u(P(0, 1), l - P(0, 0));
    Vector2l v(l - P(1, 1), P(1, 0));
    Vector2l w = u.norm() >= v.norm() ? u : v;
    return Vector2l(w / w.norm());
  };
  e.v_top = vec(l_top);
  e.v_bot = vec(l_bot);
  return e;
}

// Parlett-Reinsch balancing: diagonal similarity with power-of-two entries
// that equalizes row and column norms, shrinking |A| toward the spectral
// radius and salvaging the small eigenvalues of graded products.
Eigen::VectorXd balance_in_place(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0, rw = 0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(A(j, i));
          rw += std::abs(A(i, j));
        }
      if (c == 0 || rw == 0) continue;
      double f = 1, s = c + rw;
      while (c < rw / 2) {
        c *= 2;
        rw /= 2;
        f *= 2;
      }
      while (c >= rw * 2) {
        c /= 2;
        rw *= 2;
        f /= 2;
      }
      if (c + rw < 0.95 * s) {
        done = false;
        d[i] *= f;
        A.col(i) *= f;
        A.row(i) /= f;
      }
    }
  }
  return d;
}

}  // namespace

Eigen::MatrixXd sp_form(int n) {
  Eigen::MatrixXd O = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  O.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  O.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return O;
}

namespace {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> symmetric_power_impl(
    const Eigen::Matrix<Scalar, 2, 2>& g, int n) {
  if (n < 1) throw construction_error("dimension must be positive");
  const int d = n - 1;  // degree of the binary forms
  const Scalar a = g(0, 0), c = g(1, 0), b = g(0, 1), dd = g(1, 1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M(n, n);
  // Column k: coefficients of (a + c t)^(d-k) (b + dd t)^k in t.
  for (int k = 0; k < n; ++k) {
    std::vector<Scalar> poly{Scalar(1)};
    for (int r = 0; r < d - k; ++r) {
      std::vector<Scalar> nx(poly.size() + 1, Scalar(0));
      for (std::size_t j = 0; j < poly.size(); ++j) {
        nx[j] += a * poly[j];
        nx[j + 1] += c * poly[j];
      }
      poly = std::move(nx);
    }
    for (int r = 0; r < k; ++r) {
      std::vector<Scalar> nx(poly.size() + 1, Scalar(0));
      for (std::size_t j = 0; j < poly.size(); ++j) {
        nx[j] += b * poly[j];
        nx[j + 1] += dd * poly[j];
      }
      poly = std::move(nx);
    }
    for (int j = 0; j < n; ++j) M(j, k) = poly[static_cast<std::size_t>(j)];
  }
  return M;
}

}  // namespace

Eigen::MatrixXd symmetric_power(const Eigen::Matrix2d& g, int n) {
  return symmetric_power_impl<double>(g, n);
}

LinearRep sym_power_rep(const SurfaceModel& m, int n) {
  LinearRep r;
  r.n = n;
  r.genus = m.genus;
  r.family = RepFamily::SL;
  for (const Isometry& g : m.gens) {
    r.gens.push_back(symmetric_power(g.m, n));
    r.base_gens.push_back(g.m);
  }
  validate_rep(r);
  return r;
}

LinearRep sp_diagonal_rep(const SurfaceModel& m, int n) {
  LinearRep r;
  r.n = 2 * n;
  r.genus = m.genus;
  r.family = RepFamily::Sp;
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (const Isometry& g : m.gens) {
    Eigen::MatrixXd M(2 * n, 2 * n);
    M.topLeftCorner(n, n) = g.m(0, 0) * I;
    M.topRightCorner(n, n) = g.m(0, 1) * I;
    M.bottomLeftCorner(n, n) = g.m(1, 0) * I;
    M.bottomRightCorner(n, n) = g.m(1, 1) * I;
    r.gens.push_back(std::move(M));
    r.base_gens.push_back(g.m);
  }
  validate_rep(r);
  return r;
}

void validate_rep(const LinearRep& r) {
  if (r.genus < 2) throw construction_error("genus must be at least 2");
  if (static_cast<int>(r.gens.size()) != 2 * r.genus)
    throw construction_error("wrong number of generator matrices");
  for (const auto& g : r.gens) {
    if (g.rows() != r.n || g.cols() != r.n)
      throw construction_error("generator matrix has wrong dimensions");
    if (std::abs(g.determinant() - 1.0) > 1e-12 * std::pow(g.norm(), r.n))
      throw construction_error("generator determinant is not 1");
  }
  if (r.family == RepFamily::Sp) {
    if (r.n % 2 != 0) throw construction_error("Sp dimension must be even");
    Eigen::MatrixXd O = sp_form(r.n / 2);
    for (const auto& g : r.gens)
      if ((g.transpose() * O * g - O).cwiseAbs().maxCoeff() > 1e-8)
        throw construction_error("generator does not preserve the symplectic form");
  }
  GroupPresentation P(r.genus);
  // The rounding error of the relator product scales with the product of the
  // factor norms, which dwarfs the identity it cancels down to; the residual
  // tolerance must use that scale.
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(r.n, r.n);
  double scale = 1.0;
  for (Letter l : P.relator()) {
    const Eigen::MatrixXd& G = r.gens[static_cast<std::size_t>(std::abs(l) - 1)];
    Eigen::MatrixXd F = l > 0 ? G : Eigen::MatrixXd(G.inverse());
    R = R * F;
    scale *= F.norm();
  }
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r.n, r.n);
  double res = std::min((R - I).cwiseAbs().maxCoeff(), (R + I).cwiseAbs().maxCoeff());
  if (res > 1e-12 * scale) throw construction_error("relator image is not +/- identity");
}

Eigen::MatrixXd evaluate(const LinearRep& r, const Word& w) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(r.n, r.n);
  for (Letter l : w) {
    const Eigen::MatrixXd& G = r.gens[static_cast<std::size_t>(std::abs(l) - 1)];
    if (l > 0)
      M = M * G;
    else
      M = M * G.inverse();
  }
  return M;
}

namespace {

struct Token {
  std::string text;
  int line, col;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> out;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size() || line[i] == '#') break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back(Token{line.substr(i, j - i), ln, static_cast<int>(i + 1)});
      i = j;
    }
  }
  return out;
}

[[noreturn]] void fail_at(const Token& t, const std::string& what) {
  std::ostringstream os;
  os << what << " at line " << t.line << ", column " << t.col << " ('" << t.text << "')";
  throw parse_error(os.str());
}

}  // namespace

LinearRep parse_rep(std::istream& in, int expected_genus) {
  std::vector<Token> toks = tokenize(in);
  std::size_t p = 0;
  auto need = [&](const std::string& what) -> const Token& {
    if (p >= toks.size()) throw parse_error("unexpected end of input, expected " + what);
    return toks[p++];
  };
  auto keyword = [&](const std::string& kw) {
    const Token& t = need("keyword '" + kw + "'");
    if (t.text != kw) fail_at(t, "expected keyword '" + kw + "'");
  };
  auto integer = [&](const std::string& what) {
    const Token& t = need(what);
    try {
      std::size_t used = 0;
      int v = std::stoi(t.text, &used);
      if (used != t.text.size()) fail_at(t, "expected integer " + what);
      return v;
    } catch (const std::logic_error&) {
      fail_at(t, "expected integer " + what);
    }
  };
  LinearRep r;
  keyword("n");
  r.n = integer("dimension");
  keyword("family");
  {
    const Token& t = need("family tag");
    if (t.text == "SL")
      r.family = RepFamily::SL;
    else if (t.text == "Sp")
      r.family = RepFamily::Sp;
    else
      fail_at(t, "expected family SL or Sp");
  }
  keyword("genus");
  r.genus = integer("genus");
  if (expected_genus > 0 && r.genus != expected_genus)
    throw parse_error("representation genus does not match the configured genus");
  if (r.n < 2 || r.n > 64) throw parse_error("dimension out of range [2, 64]");
  for (int k = 0; k < 2 * r.genus; ++k) {
    Eigen::MatrixXd M(r.n, r.n);
    for (int i = 0; i < r.n; ++i)
      for (int j = 0; j < r.n; ++j) {
        const Token& t = need("matrix entry");
        try {
          std::size_t used = 0;
          M(i, j) = std::stod(t.text, &used);
          if (used != t.text.size()) fail_at(t, "expected a number");
        } catch (const std::logic_error&) {
          fail_at(t, "expected a number");
        }
      }
    r.gens.push_back(std::move(M));
  }
  if (p != toks.size()) fail_at(toks[p], "trailing input");
  validate_rep(r);
  return r;
}

void write_rep(std::ostream& out, const LinearRep& r) {
  out << "n " << r.n << "\nfamily " << (r.family == RepFamily::SL ? "SL" : "Sp")
      << "\ngenus " << r.genus << "\n";
  out.precision(17);
  for (const auto& g : r.gens) {
    for (int i = 0; i < r.n; ++i) {
      for (int j = 0; j < r.n; ++j) out << (j ? " " : "") << g(i, j);
      out << "\n";
    }
    out << "\n";
  }
}

Spectrum eigen_spectrum(const Eigen::MatrixXd& g) {
  Eigen::MatrixXd B = g;
  Eigen::VectorXd d = balance_in_place(B);
  Eigen::EigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success)
    throw spectrum_degenerate_error("eigenvalue iteration failed");
  const int n = static_cast<int>(g.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  auto mod = [&](int i) { return std::abs(es.eigenvalues()[i]); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mod(a) > mod(b); });
  Spectrum s;
  s.log_mod.resize(n);
  s.vectors.resize(n, n);
  s.real_ev.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    int i = order[static_cast<std::size_t>(k)];
    double m = mod(i);
    if (!(m > 0)) throw spectrum_degenerate_error("zero eigenvalue modulus");
    s.log_mod[k] = std::log(m);
    bool re = std::abs(es.eigenvalues()[i].imag()) <= 1e-9 * std::max(1.0, m);
    s.real_ev[static_cast<std::size_t>(k)] = re;
    if (re) {
      Eigen::VectorXd v = es.eigenvectors().col(i).real();
      if (v.norm() < 0.5) v = es.eigenvectors().col(i).imag();
      v = d.asDiagonal() * v;  // undo the balancing similarity
      v /= v.norm();
      Eigen::Index bi;
      v.cwiseAbs().maxCoeff(&bi);
      if (v[bi] < 0) v = -v;
      s.vectors.col(k) = v;
    } else {
      s.vectors.col(k).setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return s;
}

Eigen::MatrixXd eigen_flag(const Eigen::MatrixXd& g) {
  Spectrum s = eigen_spectrum(g);
  const int n = static_cast<int>(g.rows());
  for (int k = 0; k < n; ++k)
    if (!s.real_ev[static_cast<std::size_t>(k)])
      throw spectrum_degenerate_error("complex eigenvalue in flag computation");
  for (int k = 0; k + 1 < n; ++k)
    if (s.log_mod[k] - s.log_mod[k + 1] <= kGapTol)
      throw spectrum_degenerate_error("eigenvalue moduli are not separated");
  return s.vectors;
}

double length_alpha(const LinearRep& r, const CyclicWord& c, int i) {
  const int n = r.n;
  if (i < 1 || i >= n) throw construction_error("root index out of range");
  Eigen::VectorXd log_mod(n);
  if (has_base(r)) {
    double lt = static_cast<double>(base_eigen(base_evaluate(r, c.letters)).log_top);
    if (r.family == RepFamily::SL) {
      for (int k = 0; k < n; ++k) log_mod[k] = (n - 1 - 2 * k) * lt;
    } else {
      for (int k = 0; k < n; ++k) log_mod[k] = k < n / 2 ? lt : -lt;
    }
  } else {
    log_mod = eigen_spectrum(evaluate(r, c.letters)).log_mod;
  }
  auto gap_at = [&](int k) {  // between positions k and k+1 (1-indexed)
    if (log_mod[k - 1] - log_mod[k] <= kGapTol)
      throw spectrum_degenerate_error("modulus gap too small at position " + std::to_string(k));
  };
  gap_at(i);
  gap_at(n - i);
  double top = 0, bot = 0;
  for (int k = 0; k < i; ++k) top += log_mod[k];
  for (int k = n - i; k < n; ++k) bot += log_mod[k];
  return top - bot;
}

FlagPoint fixed_flag(const SurfaceModel& m, const LinearRep& r, const Word& gamma,
                     bool attracting) {
  AxisData ax = axis_data(evaluate(m, gamma));
  FlagPoint p;
  p.at = attracting ? ax.attracting : ax.repelling;
  if (has_base(r) && r.family == RepFamily::SL) {
    // Eigenvectors of the symmetric power are the monomials in the base
    // eigenvectors, i.e. the columns of the symmetric power of [v_top v_bot].
    BaseEigen e = base_eigen(base_evaluate(r, gamma));
    Matrix2l V;
    V.col(0) = attracting ? e.v_top : e.v_bot;
    V.col(1) = attracting ? e.v_bot : e.v_top;
    MatrixXl F = symmetric_power_impl<long double>(V, r.n);
    p.flag = orthonormalize_nested<long double>(F).cast<double>();
  } else {
    Eigen::MatrixXd F = eigen_flag(evaluate(r, gamma));
    if (!attracting) F = F.rowwise().reverse().eval();
    p.flag = orthonormalize_nested<double>(F);
  }
  return p;
}

FlagPoint translate_flag(const SurfaceModel& m, const LinearRep& r, const Word& g,
                         const FlagPoint& p) {
  FlagPoint q;
  q.at = apply(evaluate(m, g), p.at);
  MatrixXl A = MatrixXl::Identity(r.n, r.n);
  for (Letter l : g) {
    MatrixXl G = r.gens[static_cast<std::size_t>(std::abs(l) - 1)].cast<long double>();
    A = l > 0 ? (A * G).eval() : (A * G.inverse()).eval();
  }
  q.flag = orthonormalize_nested<long double>(A * p.flag.cast<long double>()).cast<double>();
  return q;
}

namespace {

long double stacked_det(const FlagPoint& a, int ka, const FlagPoint& b, int kb) {
  const Eigen::Index n = a.flag.rows();
  MatrixXl M(n, n);
  M.leftCols(ka) = a.flag.leftCols(ka).cast<long double>();
  M.rightCols(kb) = b.flag.leftCols(kb).cast<long double>();
  return M.determinant();
}

long double checked_det(const FlagPoint& a, int ka, const FlagPoint& b, int kb) {
  long double d = stacked_det(a, ka, b, kb);
  if (std::abs(d) < kWedgeTol)
    throw degenerate_wedge_error("stacked flag determinant vanishes");
  return d;
}

}  // namespace

double wedge_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                   const FlagPoint& w, int i) {
  const int n = static_cast<int>(x.flag.rows());
  if (i < 1 || i >= n) throw construction_error("root index out of range");
  long double num = checked_det(x, n - i, z, i) * checked_det(y, n - i, w, i);
  long double den = checked_det(x, n - i, w, i) * checked_det(y, n - i, z, i);
  return static_cast<double>(std::log(std::abs(num / den)));
}

double hitchin_cross_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                           const FlagPoint& w, int i) {
  const int n = static_cast<int>(x.flag.rows());
  return 0.5 * (wedge_ratio(x, y, z, w, i) + wedge_ratio(x, y, z, w, n - i));
}

double labourie_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                      const FlagPoint& w) {
  const int n = static_cast<int>(x.flag.rows());
  auto pair = [&](const FlagPoint& p, const FlagPoint& q) {
    long double d = stacked_det(p, n - 1, q, 1);
    if (std::abs(d) < kWedgeTol)
      throw transversality_error("line meets hyperplane in the Labourie ratio");
    return d;
  };
  return static_cast<double>((pair(x, y) * pair(z, w)) / (pair(x, w) * pair(z, y)));
}

double labourie_cross_ratio(const FlagPoint& x, const FlagPoint& y, const FlagPoint& z,
                            const FlagPoint& w) {
  return 0.5 * std::log(std::abs(labourie_ratio(x, z, y, w) * labourie_ratio(z, x, w, y)));
}

LagrangianPoint fixed_lagrangian(const SurfaceModel& m, const LinearRep& r,
                                 const Word& gamma, bool attracting) {
  if (r.family != RepFamily::Sp)
    throw non_lagrangian_error("representation does not preserve a symplectic form");
  const int n2 = r.n, n = n2 / 2;
  if (has_base(r)) {
    // Diagonal embedding: the top/bottom eigenspace is v (x) R^n.
    BaseEigen e = base_eigen(base_evaluate(r, gamma));
    AxisData bax = axis_data(evaluate(m, gamma));
    Eigen::Vector2d v = (attracting ? e.v_top : e.v_bot).cast<double>();
    LagrangianPoint p;
    p.at = attracting ? bax.attracting : bax.repelling;
    p.basis = Eigen::MatrixXd::Zero(n2, n);
    for (int k = 0; k < n; ++k) {
      p.basis(k, k) = v[0];
      p.basis(n + k, k) = v[1];
    }
    return p;
  }
  Spectrum s = eigen_spectrum(evaluate(r, gamma));
  if (s.log_mod[n - 1] - s.log_mod[n] <= kGapTol)
    throw spectrum_degenerate_error("no modulus gap between the Lagrangian halves");
  for (int k = 0; k < n2; ++k)
    if (!s.real_ev[static_cast<std::size_t>(k)])
      throw spectrum_degenerate_error("complex eigenvalue in Lagrangian computation");
  AxisData ax = axis_data(evaluate(m, gamma));
  LagrangianPoint p;
  p.at = attracting ? ax.attracting : ax.repelling;
  p.basis = orthonormalize_nested(attracting ? Eigen::MatrixXd(s.vectors.leftCols(n))
                                             : Eigen::MatrixXd(s.vectors.rightCols(n)));
  Eigen::MatrixXd O = sp_form(n);
  if ((p.basis.transpose() * O * p.basis).cwiseAbs().maxCoeff() > 1e-9)
    throw non_lagrangian_error("invariant subspace is not Omega-isotropic");
  return p;
}

LagrangianPoint translate_lagrangian(const SurfaceModel& m, const LinearRep& r,
                                     const Word& g, const LagrangianPoint& p) {
  LagrangianPoint q;
  q.at = apply(evaluate(m, g), p.at);
  MatrixXl A = MatrixXl::Identity(r.n, r.n);
  for (Letter l : g) {
    MatrixXl G = r.gens[static_cast<std::size_t>(std::abs(l) - 1)].cast<long double>();
    A = l > 0 ? (A * G).eval() : (A * G.inverse()).eval();
  }
  q.basis = orthonormalize_nested<long double>(A * p.basis.cast<long double>()).cast<double>();
  return q;
}

double maximal_cross_ratio(const LagrangianPoint& x, const LagrangianPoint& y,
                           const LagrangianPoint& z, const LagrangianPoint& w) {
  const Eigen::Index n2 = x.basis.rows();
  Eigen::MatrixXd O = sp_form(static_cast<int>(n2) / 2);
  for (const LagrangianPoint* p : {&x, &y, &z, &w})
    if ((p->basis.transpose() * O * p->basis).cwiseAbs().maxCoeff() >
        1e-9 * std::max(1.0, p->basis.cwiseAbs().maxCoeff()))
      throw non_lagrangian_error("argument subspace is not Omega-isotropic");
  MatrixXl Ol = O.cast<long double>();
  auto pairing = [&](const LagrangianPoint& a, const LagrangianPoint& b) {
    MatrixXl P = a.basis.transpose().cast<long double>() * Ol * b.basis.cast<long double>();
    long double d = P.determinant();
    if (std::abs(d) < kWedgeTol)
      throw transversality_error("Lagrangian pair is not transverse");
    return d;
  };
  long double num = pairing(x, z) * pairing(y, w);
  long double den = pairing(x, w) * pairing(y, z);
  return static_cast<double>(std::log(std::abs(num / den)));
}

}  // namespace surf
