#include "surf/intersect.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <list>
#include <set>
#include <unordered_map>

namespace surf {

namespace {

// Tuning of the localized window search.  A fundamental segment of an axis
// is cut into pieces of length ~kSegLen, each folded back into the
// fundamental polygon; crossing lifts then always pass within
// kSegLen/2 + polygon radius of the base point, which bounds the lift sets.
constexpr double kSegLen = 2.0;
constexpr double kRadiusStep = 0.35;  // two saturation increments
constexpr double kStepLen = 0.25;     // axis sampling step for lift harvesting
// Offset of the window start past the foot point, an "irrational" fraction
// of the segment length so that crossings never sit on cut boundaries.
constexpr double kWindowShift = 0.123456789 / 3.14159265358979;

struct MatKey {
  std::int64_t a, b, c, d;
  bool operator==(const MatKey& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};
struct MatKeyHash {
  std::size_t operator()(const MatKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.a, k.b, k.c, k.d}) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

MatKey iso_key(const Isometry& g) {
  Eigen::Matrix2d M = g.m;
  // Sign-normalize: make the entry of largest magnitude positive.
  int bi = 0, bj = 0;
  M.cwiseAbs().maxCoeff(&bi, &bj);
  if (M(bi, bj) < 0) M = -M;
  auto q = [](double x) { return static_cast<std::int64_t>(std::llround(x * 1e6)); };
  return MatKey{q(M(0, 0)), q(M(0, 1)), q(M(1, 0)), q(M(1, 1))};
}

Vec3 sign_normalize(Vec3 n) {
  int bi = 0;
  n.cwiseAbs().maxCoeff(&bi);
  if (n[bi] < 0) n = -n;
  return n;
}

struct Vec3Key {
  std::int64_t x, y, z;
  bool operator==(const Vec3Key& o) const { return x == o.x && y == o.y && z == o.z; }
};
struct Vec3KeyHash {
  std::size_t operator()(const Vec3Key& k) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};
Vec3Key vec_key(const Vec3& n) {
  auto q = [](double x) { return static_cast<std::int64_t>(std::llround(x * 1e5)); };
  return Vec3Key{q(n[0]), q(n[1]), q(n[2])};
}

std::string word_key(const Word& w) {
  return std::string(reinterpret_cast<const char*>(w.data()), w.size());
}

Word word_power(const Word& w, int k) {
  Word b = k < 0 ? inverse(w) : w;
  Word r;
  for (int i = 0; i < std::abs(k); ++i) r = concat(r, b);
  return r;
}

// Null boundary vectors (z = 1) of an axis, its unit normal, and the
// signed arclength parameter t(X) = (1/2) log(<X,R>/<X,A>), increasing
// toward the attracting endpoint.
struct Frame {
  Vec3 A, R, N;
  double t(const Vec3& X) const { return 0.5 * std::log(mink(X, R) / mink(X, A)); }
  Vec3 at(double t) const {
    Vec3 X = std::exp(t) * A + std::exp(-t) * R;
    return normalize_timelike(X);
  }
};

Frame make_frame(const AxisData& ax) {
  Frame f;
  f.A = boundary_vec(ax.attracting);
  f.R = boundary_vec(ax.repelling);
  f.N = geodesic_normal(ax.attracting, ax.repelling);
  return f;
}

// Point and forward unit tangent at parameter t on the axis.  Walks carry
// (point, tangent, normal) rather than the ideal endpoints: errors in the
// repelling endpoint grow with the square of the distance walked, while the
// local triple only picks up the folding factor itself.
void point_tangent(const Frame& f, double t, Vec3& u, Vec3& tang) {
  double s = std::sqrt(-2.0 * mink(f.A, f.R));
  u = (std::exp(t) * f.A + std::exp(-t) * f.R) / s;
  tang = (std::exp(t) * f.A - std::exp(-t) * f.R) / s;
}

}  // namespace

struct IntersectionEngine::Impl {
  SurfaceModel model;
  GroupPresentation pres;
  double r_poly;
  double seg_reach;   // kSegLen/2 + r_poly + margin: base lift radius
  double lift_reach;  // seg_reach + two saturation increments

  // Side-pairing moves: T matrices, their std-letter words.
  std::vector<Eigen::Matrix3d> move_T;
  std::vector<Word> move_word;

  struct BallElem {
    Eigen::Matrix3d T;
    Word word;
    double dist;
  };
  mutable std::vector<BallElem> ball;  // lazily built

  struct Seg {
    Vec3 u;          // folded segment midpoint (in the fundamental polygon)
    Vec3 tang;       // folded forward unit tangent at u
    Vec3 n;          // folded unit normal of the axis
    double width;    // segment length along the axis
    Word tau;        // folding element (std letters): tau * segment ~ polygon
  };
  struct Window {
    Word rep;        // chosen rotation of the class word
    Frame base;      // axis frame of rho(rep)
    double ell;      // translation length
    double t_start;  // window is [t_start, t_start + ell)
    std::vector<Seg> segs;
  };
  mutable std::unordered_map<std::string, Window> window_cache;

  struct Lift {
    Vec3 n;        // sign-normalized unit normal of the lift axis
    double adist;  // distance of the lift from the base point
    Word eta;      // lift = eta * (axis of rho(rep)); only when with_words
  };
  struct LiftSet {
    Word rep;
    double ell = 0;
    int root_power = 1;
    bool with_words = false;
    std::vector<Lift> lifts;
  };
  mutable std::unordered_map<std::string, LiftSet> lift_cache;
  mutable std::list<std::string> lift_lru;

  // Per-rotation axis data of a cyclic word, for the combinatorial count.
  struct RotFrame {
    AxisData ax;   // axis of the rotated word (passes near the base point)
    Vec3 n;        // its unit normal
    Eigen::Matrix3d S;  // matrix of the prefix: undoes the rotation
    Word sigma;    // prefix word
    Word rotated;  // the rotated word itself
  };
  mutable std::unordered_map<std::string, std::vector<RotFrame>> rot_cache;

  const std::vector<RotFrame>& rotations(const Word& w) const {
    std::string key = word_key(w);
    auto it = rot_cache.find(key);
    if (it != rot_cache.end()) return it->second;
    std::vector<RotFrame> out(w.size());
    Isometry pre;
    for (std::size_t k = 0; k < w.size(); ++k) {
      RotFrame& r = out[k];
      r.rotated = rotate(w, k);
      r.ax = axis_data(evaluate(model, r.rotated));
      r.n = geodesic_normal(r.ax.attracting, r.ax.repelling);
      r.S = so21(pre);
      r.sigma = Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
      pre = pre * evaluate(model, Word{w[k]});
    }
    return rot_cache.emplace(std::move(key), std::move(out)).first->second;
  }

  explicit Impl(SurfaceModel m) : model(std::move(m)), pres(model.genus) {
    r_poly = model.polygon_radius;
    seg_reach = kSegLen / 2 + r_poly + 0.25;
    lift_reach = seg_reach + 2 * kRadiusStep;
    for (std::size_t i = 0; i < model.pairings.size(); ++i) {
      move_T.push_back(so21(model.pairings[i]));
      move_word.push_back(model.pairing_words[i]);
      move_T.push_back(so21(model.pairings[i].inverse()));
      move_word.push_back(inverse(model.pairing_words[i]));
    }
  }

  // ---- ball of group elements around the base point ------------------

  void build_ball() const {
    if (!ball.empty()) return;
    const double reach = lift_reach + kStepLen / 2 + r_poly + 0.1;
    const double prune = reach + r_poly + 0.1;
    std::unordered_map<MatKey, bool, MatKeyHash> seen;
    std::deque<std::pair<Isometry, Word>> queue;
    Isometry id;
    seen.emplace(iso_key(id), true);
    queue.emplace_back(id, Word{});
    auto dist_of = [](const Isometry& g) {
      double c = g.m.squaredNorm() / 2.0;
      return std::acosh(std::max(1.0, c));
    };
    while (!queue.empty()) {
      auto [g, w] = queue.front();
      queue.pop_front();
      double d = dist_of(g);
      if (d <= reach) ball.push_back(BallElem{so21(g), w, d});
      if (d > prune) continue;
      for (std::size_t i = 0; i < model.pairings.size(); ++i) {
        for (int s : {0, 1}) {
          Isometry nx = g * (s ? model.pairings[i].inverse() : model.pairings[i]);
          if (!seen.emplace(iso_key(nx), true).second) continue;
          Word nw = concat(w, s ? inverse(model.pairing_words[i]) : model.pairing_words[i]);
          queue.emplace_back(nx, nw);
        }
      }
    }
  }

  // ---- folding -------------------------------------------------------

  // Greedy Dirichlet descent: apply side pairings while they bring the
  // point closer to the base point.  Appends the applied moves (as move
  // indices) to `moves`; the final point lies in the fundamental polygon.
  Vec3 fold(Vec3 v, std::vector<int>& moves) const {
    while (true) {
      int best = -1;
      double bz = v[2] - 1e-12;
      for (std::size_t i = 0; i < move_T.size(); ++i) {
        double z = move_T[i].row(2).dot(v);
        if (z < bz) {
          bz = z;
          best = static_cast<int>(i);
        }
      }
      if (best < 0) return v;
      v = move_T[static_cast<std::size_t>(best)] * v;
      moves.push_back(best);
    }
  }

  // Moves apply left to right as matrices (T_k ... T_1), so the word of the
  // composite is built by prepending each successive move's word.
  Word moves_to_word(const std::vector<int>& moves) const {
    Word w;
    for (int mv : moves) w = concat(move_word[static_cast<std::size_t>(mv)], w);
    return w;
  }

  // ---- representative rotation and axis walking ----------------------

  // The rotation of the cyclic word whose axis passes closest to the base
  // point, so the walk starts well-conditioned.
  Word best_rotation(const Word& cw) const {
    Word best;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cw.size(); ++k) {
      Word r = rotate(cw, k);
      AxisData ax = axis_data(evaluate(model, r));
      Frame f = make_frame(ax);
      double d = std::abs(mink(base_point(), f.N));
      if (d < bd - 1e-12) {
        bd = d;
        best = r;
      }
    }
    return best;
  }

  // Walks one period of the axis in steps, folding incrementally so every
  // computation happens near the base point.  `visit` receives the folded
  // step midpoint with its forward tangent and axis normal, the step width,
  // and the accumulated folding word.
  template <typename F>
  void walk_axis(const Frame& base, double ell, double t_start, int nstep, F&& visit) const {
    double w = ell / nstep;
    Vec3 u, tang;
    point_tangent(base, t_start + w / 2, u, tang);
    Vec3 n = base.N;
    std::vector<int> moves;
    Word tau;
    for (int j = 0; j < nstep; ++j) {
      if (j > 0) {
        Vec3 nu = std::cosh(w) * u + std::sinh(w) * tang;
        tang = std::sinh(w) * u + std::cosh(w) * tang;
        u = nu;
      }
      moves.clear();
      u = fold(u, moves);
      if (!moves.empty()) {
        for (int mv : moves) {
          const Eigen::Matrix3d& T = move_T[static_cast<std::size_t>(mv)];
          tang = T * tang;
          n = T * n;
        }
        // Re-orthonormalize so round-off does not compound across folds.
        u /= std::sqrt(-mink(u, u));
        tang += mink(tang, u) * u;
        tang /= std::sqrt(mink(tang, tang));
        n += mink(n, u) * u;
        n -= mink(n, tang) * tang;
        n /= std::sqrt(mink(n, n));
        tau = concat(moves_to_word(moves), tau);
      }
      visit(j, u, tang, n, w, tau);
    }
  }

  // ---- windows and lift sets -----------------------------------------

  const Window& window(const CyclicWord& c) const {
    std::string key = word_key(c.letters);
    auto it = window_cache.find(key);
    if (it != window_cache.end()) return it->second;
    Window W;
    W.rep = best_rotation(c.letters);
    AxisData ax = axis_data(evaluate(model, W.rep));
    W.base = make_frame(ax);
    W.ell = ax.length;
    double t_foot = W.base.t(base_point());
    W.t_start = t_foot + kWindowShift * W.ell;
    int nseg = std::max(1, static_cast<int>(std::ceil(W.ell / kSegLen)));
    walk_axis(W.base, W.ell, W.t_start, nseg,
              [&](int, const Vec3& u, const Vec3& tang, const Vec3& n, double w, const Word& tau) {
                W.segs.push_back(Seg{u, tang, n, w, tau});
              });
    return window_cache.emplace(std::move(key), std::move(W)).first->second;
  }

  const LiftSet& lifts(const CyclicWord& c, bool with_words) const {
    std::string key = word_key(c.letters);
    auto it = lift_cache.find(key);
    if (it != lift_cache.end() && (it->second.with_words || !with_words)) {
      lift_lru.remove(key);
      lift_lru.push_back(key);
      return it->second;
    }
    build_ball();
    LiftSet L;
    L.with_words = with_words;
    L.rep = best_rotation(c.letters);
    L.root_power = primitive_root(pres, c).power;
    AxisData ax = axis_data(evaluate(model, L.rep));
    Frame base = make_frame(ax);
    L.ell = ax.length;
    double t_foot = base.t(base_point());

    // Base lifts: translates of the axis meeting the fundamental polygon,
    // harvested by walking one period.
    struct BaseLift {
      Vec3 n;
      Word tau;
    };
    std::vector<BaseLift> bases;
    std::unordered_map<Vec3Key, bool, Vec3KeyHash> base_seen;
    int nstep = std::max(1, static_cast<int>(std::ceil(L.ell / kStepLen)));
    walk_axis(base, L.ell, t_foot, nstep,
              [&](int, const Vec3&, const Vec3&, const Vec3& nf, double, const Word& tau) {
                Vec3 n = sign_normalize(nf);
                if (base_seen.emplace(vec_key(n), true).second)
                  bases.push_back(BaseLift{n, tau});
              });

    const double max_nz = std::sinh(lift_reach);
    std::unordered_map<Vec3Key, bool, Vec3KeyHash> seen;
    for (const BallElem& h : ball) {
      for (const BaseLift& b : bases) {
        Vec3 n = h.T * b.n;
        if (std::abs(n[2]) > max_nz) continue;
        n = sign_normalize(n);
        if (!seen.emplace(vec_key(n), true).second) continue;
        Lift lf;
        lf.n = n;
        lf.adist = std::asinh(std::abs(n[2]));
        if (with_words) lf.eta = concat(h.word, b.tau);
        L.lifts.push_back(std::move(lf));
      }
    }

    // Bounded cache of lift sets (the all-pairs loops sweep one class at a
    // time, so a handful of entries suffices).
    if (it != lift_cache.end()) {
      it->second = std::move(L);
      return it->second;
    }
    if (lift_cache.size() >= 8) {
      lift_cache.erase(lift_lru.front());
      lift_lru.pop_front();
    }
    lift_lru.push_back(key);
    return lift_cache.emplace(std::move(key), std::move(L)).first->second;
  }

  // ---- crossing enumeration ------------------------------------------

  struct Hit {
    int seg;
    int lift;
    double off;       // offset from the segment midpoint along the axis
    double t_global;  // parameter along the base axis, window-relative
    Vec3 n_f;         // lift normal in the folded frame
  };

  std::vector<Hit> crossings(const Window& W, const LiftSet& Ld) const {
    std::vector<Hit> out;
    double t_acc = 0.0;
    for (std::size_t j = 0; j < W.segs.size(); ++j) {
      const Seg& sg = W.segs[j];
      const double pre = std::sinh(sg.width / 2 + 0.05);
      for (std::size_t i = 0; i < Ld.lifts.size(); ++i) {
        const Lift& lf = Ld.lifts[i];
        if (std::abs(mink(sg.u, lf.n)) > pre) continue;
        // Transversality: near-tangent normals are numerically perturbed
        // copies of the segment's own axis, never genuine crossings.
        double mv = mink(sg.n, lf.n);
        double q = 1.0 - mv * mv;
        if (!(q > 1e-12)) continue;
        Vec3 e = sg.n.cross(lf.n);
        Vec3 X(e[0], e[1], -e[2]);
        X /= std::sqrt(q);
        if (X[2] < 0) X = -X;
        double off = std::asinh(mink(X, sg.tang));  // position within the segment
        if (off < -sg.width / 2 || off >= sg.width / 2) continue;
        if (lf.adist > seg_reach + 1e-9)
          throw saturation_error("crossing lift outside the saturation radius");
        double t_global = t_acc + sg.width / 2 + off;
        bool dup = false;
        for (const Hit& h : out)
          if (std::abs(h.t_global - t_global) < 1e-7 &&
              ((h.n_f - lf.n).cwiseAbs().maxCoeff() < 1e-6 ||
               (h.n_f + lf.n).cwiseAbs().maxCoeff() < 1e-6) &&
              h.seg == static_cast<int>(j))
            dup = true;
        if (!dup)
          out.push_back(Hit{static_cast<int>(j), static_cast<int>(i), off, t_global, lf.n});
      }
      t_acc += sg.width;
    }
    return out;
  }
};

IntersectionEngine::IntersectionEngine(SurfaceModel model)
    : impl_(std::make_unique<Impl>(std::move(model))) {}
IntersectionEngine::~IntersectionEngine() = default;

const SurfaceModel& IntersectionEngine::model() const { return impl_->model; }
const GroupPresentation& IntersectionEngine::presentation() const { return impl_->pres; }

int IntersectionEngine::geometric_intersection(const CyclicWord& c, const CyclicWord& d) const {
  const Impl::Window& W = impl_->window(c);
  const Impl::LiftSet& L = impl_->lifts(d, false);
  auto hits = impl_->crossings(W, L);
  return static_cast<int>(hits.size()) * L.root_power;
}

std::vector<Crossing> IntersectionEngine::self_intersections(const CyclicWord& c) const {
  if (primitive_root(impl_->pres, c).power != 1)
    throw construction_error("class is not primitive");
  const Impl::Window& W = impl_->window(c);
  const Impl::LiftSet& L = impl_->lifts(c, true);
  auto hits = impl_->crossings(W, L);
  const double ell = W.ell;

  std::vector<Crossing> out;
  for (const auto& h : hits) {
    const Impl::Seg& sg = W.segs[static_cast<std::size_t>(h.seg)];
    const Impl::Lift& lf = L.lifts[static_cast<std::size_t>(h.lift)];
    // Conjugator of the crossing lift: lift = eta_total * axis.
    Word eta = concat(inverse(sg.tau), lf.eta);
    // The partner strand through the same surface point: gamma2 = rep^k
    // eta^-1 maps the crossing point to another window point; keep only the
    // lexicographically smaller member of each orbit pair.
    // Crossing point in the folded frame.
    Vec3 Xf = std::cosh(h.off) * sg.u + std::sinh(h.off) * sg.tang;
    // tau * eta_total cancels to the stored (local) lift conjugator.
    Isometry eta_f = evaluate(impl_->model, lf.eta);
    Vec3 Y = so21(eta_f.inverse()) * Xf;   // = eta_total^-1 * crossing point
    Y = normalize_timelike(Y);
    if (std::abs(mink(Y, W.base.N)) > 1e-6)
      throw invalid_crossing_error("conjugated crossing point left the axis");
    double t_p = W.t_start + h.t_global;
    double t_y = W.base.t(Y);
    int k = static_cast<int>(std::floor((t_p - t_y) / ell + 1e-9)) + 1;
    double t_partner = t_y + k * ell - W.t_start;
    if (t_partner >= ell - 1e-9) t_partner -= ell;
    if (t_partner < h.t_global - 1e-7) continue;  // partner is the representative
    if (std::abs(t_partner - h.t_global) <= 1e-7) {
      // Same-parameter pair: break the tie on the conjugated axis normal.
      Word g2 = concat(word_power(W.rep, k), inverse(eta));
      Word g2n = element_normal_form(impl_->pres, g2);
      Vec3 pn = sign_normalize(so21(evaluate(impl_->model, g2n)) * W.base.N).normalized();
      Word en = element_normal_form(impl_->pres, eta);
      Vec3 mn = sign_normalize(so21(evaluate(impl_->model, en)) * W.base.N).normalized();
      bool keep = false;
      for (int i = 0; i < 3; ++i) {
        if (std::abs(mn[i] - pn[i]) > 1e-7) {
          keep = mn[i] < pn[i];
          break;
        }
      }
      if (!keep) continue;
    }
    Crossing cr;
    cr.conjugator = eta;
    cr.parameter = h.t_global / ell;
    // Crossing point in the disk: unfold the folded point (expanding
    // direction, numerically benign).
    Vec3 X = so21(evaluate(impl_->model, inverse(sg.tau))) * Xf;
    X = normalize_timelike(X);
    cr.point = Eigen::Vector2d(X[0] / (1 + X[2]), X[1] / (1 + X[2]));
    out.push_back(std::move(cr));
  }
  return out;
}

std::array<CyclicWord, 3> IntersectionEngine::surgery_split(const CyclicWord& c,
                                                            const Crossing& x) const {
  const Impl::Window& W = impl_->window(c);
  const double ell = W.ell;
  double t_p = W.t_start + x.parameter * ell;
  // Reconstruct the crossing point and check the conjugate axis really
  // passes through it.
  // The point may be far from the base point; all computations below stay
  // in well-conditioned directions (products of generator matrices).
  int nseg = static_cast<int>(W.segs.size());
  int j = std::min(nseg - 1, static_cast<int>(x.parameter * nseg));
  const Impl::Seg& sg = W.segs[static_cast<std::size_t>(j)];
  double off = x.parameter * ell - (j + 0.5) * (ell / nseg);
  Vec3 Xf = std::cosh(off) * sg.u + std::sinh(off) * sg.tang;
  Word eta_fold = free_reduce(concat(sg.tau, x.conjugator));
  Isometry eta_f = evaluate(impl_->model, element_normal_form(impl_->pres, eta_fold));
  Vec3 Y = normalize_timelike(so21(eta_f.inverse()) * Xf);
  if (std::abs(mink(Y, W.base.N)) > 1e-6)
    throw invalid_crossing_error("conjugator does not map the point back to the axis");
  // Also require the conjugate axis to pass through the crossing point.
  if (std::abs(mink(Xf, so21(eta_f) * W.base.N)) > 1e-6)
    throw invalid_crossing_error("no transverse crossing at the given point");
  double t_y = W.base.t(Y);
  int k = static_cast<int>(std::floor((t_p - t_y) / ell + 1e-9)) + 1;
  double t2 = t_y + k * ell;
  if (!(t2 > t_p - 1e-9 && t2 <= t_p + ell + 1e-9))
    throw invalid_crossing_error("factor does not move the point into the window");

  Word g2 = concat(word_power(W.rep, k), inverse(x.conjugator));
  Word g3 = concat(W.rep, inverse(g2));
  CyclicWord c1, c2, c3;
  try {
    c2 = canonicalize(impl_->pres, g2);
    c3 = canonicalize(impl_->pres, g3);
    c1 = canonicalize(impl_->pres, concat(inverse(g3), g2));
  } catch (const Error& e) {
    throw invalid_crossing_error(std::string("degenerate surgery factor: ") + e.what());
  }
  return {c1, c2, c3};
}

// Every crossing of the two closed geodesics lifts to a linked pair of
// rotation axes (the classical cyclic-word criterion), but distinct
// rotation pairs can present the same crossing: the pair (k,m) stands for
// the lift element sigma_k * rot_m(d) * sigma_k^-1 (sigma_k a prefix of c),
// and a lift crosses one axis period of c exactly once, as does each of its
// conjugates by powers of c.  So the crossing count is the number of
// <c>-conjugation orbits of lift elements over linked pairs -- an exact
// combinatorial invariant, deduplicated on normal forms.
int IntersectionEngine::linked_pairs_count(const CyclicWord& c, const CyclicWord& d) const {
  const GroupPresentation& P = impl_->pres;
  PrimitiveRoot prc = primitive_root(P, c);
  PrimitiveRoot prd = primitive_root(P, d);
  const Word& wc = prc.root.letters;
  const Word& wd = prd.root.letters;
  const auto& rc = impl_->rotations(wc);
  const auto& rd = impl_->rotations(wd);

  auto shorter = [](const Word& x, const Word& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  };
  // Canonical representative of the <c>-conjugation orbit of g: the
  // (length, lex)-least normal form among conjugates c^-j g c^j.  Word
  // length of the conjugates grows linearly in |j| once past the minimum,
  // so scanning each direction until the length clears the best by a full
  // conjugation step terminates with the true minimum.
  auto orbit_key = [&](Word g) {
    Word best = g;
    for (int dir : {0, 1}) {
      const Word& s = dir ? inverse(wc) : wc;
      const Word& si = dir ? wc : inverse(wc);
      Word cur = g;
      while (true) {
        cur = element_normal_form(P, concat(si, concat(cur, s)));
        if (shorter(cur, best)) best = cur;
        if (cur.size() > best.size() + 2 * wc.size() + 2) break;
      }
    }
    return word_key(best);
  };

  std::set<std::string> orbits;
  std::unordered_map<std::string, std::string> memo;  // lift -> orbit key
  for (const auto& a : rc)
    for (const auto& b : rd) {
      bool lk;
      try {
        lk = linked(a.ax.attracting, a.ax.repelling, b.ax.attracting, b.ax.repelling);
      } catch (const Error&) {
        continue;  // shared endpoint: the same axis, no transverse crossing
      }
      if (!lk) continue;
      Word lift = element_normal_form(
          P, concat(a.sigma, concat(b.rotated, inverse(a.sigma))));
      auto [it, fresh] = memo.emplace(word_key(lift), std::string());
      if (fresh) it->second = orbit_key(lift);
      orbits.insert(it->second);
    }
  return static_cast<int>(orbits.size()) * prc.power * prd.power;
}

}  // namespace surf
