#include "surf/pants.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace surf {

namespace {

// Window-folding tuning, matching the intersection machinery: axis windows
// are cut into ~kSegLen pieces folded into the fundamental polygon, so every
// geometric test happens near the base point with bounded matrices.
constexpr double kSegLen = 2.0;
constexpr double kStepLen = 0.25;
constexpr double kRadiusStep = 0.35;
constexpr double kWindowShift = 0.123456789 / 3.14159265358979;
constexpr double kPi = 3.14159265358979323846;
// Spiral-fan truncation: deeper translates of a quotient edge are closer to
// the accumulating pants axis than the endpoint resolution and cannot carry
// nodes or neighbor structure.
constexpr int kSpiralDepth = 7;
constexpr double kEndpointRes = 1e-9;
// Node tests scan this many fan translates on each side of a vertex.
constexpr int kFanScan = 9;
// Orbit window for the mass-minimizing transversal segment.
constexpr int kOrbitWindow = 4;

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

struct Frame {
  Vec3 A, R, N;
  double t(const Vec3& X) const { return 0.5 * std::log(mink(X, R) / mink(X, A)); }
};
Frame make_frame(const AxisData& ax) {
  Frame f;
  f.A = boundary_vec(ax.attracting);
  f.R = boundary_vec(ax.repelling);
  f.N = geodesic_normal(ax.attracting, ax.repelling);
  return f;
}
void point_tangent(const Frame& f, double t, Vec3& u, Vec3& tang) {
  double s = std::sqrt(-2.0 * mink(f.A, f.R));
  u = (std::exp(t) * f.A + std::exp(-t) * f.R) / s;
  tang = (std::exp(t) * f.A - std::exp(-t) * f.R) / s;
}

// Counterclockwise span from a to b in [0, 2pi).
double ccw_span(double a, double b) {
  double d = std::fmod(b - a, 2 * kPi);
  if (d < 0) d += 2 * kPi;
  return d;
}
// Whether x lies strictly inside the counterclockwise arc (from, to).
bool arc_contains(BoundaryPoint from, BoundaryPoint to, BoundaryPoint x) {
  double span = ccw_span(from.angle, to.angle);
  double off = ccw_span(from.angle, x.angle);
  return off > 1e-12 && off < span - 1e-12;
}

double angle_of(const Vec3& null_vec) { return std::atan2(null_vec[1], null_vec[0]); }

// Per-letter circle maps and hyperboloid matrices: all boundary-point and
// point transports are applied letter by letter, which keeps every matrix
// involved bounded (a single generator) regardless of the word length.
struct LetterMaps {
  std::vector<Isometry> iso;          // indexed by letter_rank
  std::vector<Eigen::Matrix3d> T;

  explicit LetterMaps(const SurfaceModel& m) {
    int n = 2 * m.genus;
    iso.resize(2 * static_cast<std::size_t>(n));
    T.resize(iso.size());
    for (int k = 1; k <= n; ++k) {
      const Isometry& g = m.gens[static_cast<std::size_t>(k - 1)];
      iso[static_cast<std::size_t>(letter_rank(static_cast<Letter>(k)))] = g;
      iso[static_cast<std::size_t>(letter_rank(static_cast<Letter>(-k)))] = g.inverse();
    }
    for (std::size_t i = 0; i < iso.size(); ++i) T[i] = so21(iso[i]);
  }

  BoundaryPoint map_angle(const Word& w, BoundaryPoint a) const {
    for (auto it = w.rbegin(); it != w.rend(); ++it)
      a = apply(iso[static_cast<std::size_t>(letter_rank(*it))], a);
    return a;
  }
  Vec3 map_point(const Word& w, Vec3 v) const {
    int step = 0;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      v = T[static_cast<std::size_t>(letter_rank(*it))] * v;
      if (++step % 16 == 0) v = normalize_timelike(v);
    }
    return normalize_timelike(v);
  }
};

// Structured conjugating map lead * center^pow * tail, applied through the
// letter maps so that deep spiral powers never form an explicit matrix.
struct PreMap {
  Word lead;
  Word center;
  int pow = 0;
  Word tail;

  Word word() const { return concat(lead, concat(word_power(center, pow), tail)); }
  BoundaryPoint map_angle(const LetterMaps& lm, BoundaryPoint a) const {
    a = lm.map_angle(tail, a);
    Word c = pow < 0 ? inverse(center) : center;
    for (int i = 0; i < std::abs(pow); ++i) a = lm.map_angle(c, a);
    return lm.map_angle(lead, a);
  }
};

// Geodesic normal through two hyperboloid points.
Vec3 segment_normal(const Vec3& p, const Vec3& q) {
  Vec3 e = p.cross(q);
  Vec3 n(e[0], e[1], -e[2]);
  double s = mink(n, n);
  if (!(s > 1e-18)) throw coincident_point_error("degenerate point pair");
  return n / std::sqrt(s);
}

// ---- pant-triple search ---------------------------------------------------

// Tracks a conjugator while cyclically Dehn-reducing w; maintains the
// invariant  original = pre * w * pre^-1.
bool reduce_step(const GroupPresentation& P, Word& w, Word& pre) {
  w = free_reduce(w);
  bool did = false;
  while (w.size() >= 2 && w.front() == inv(w.back())) {
    pre = concat(pre, Word{w.front()});
    w = free_reduce(Word(w.begin() + 1, w.end() - 1));
    did = true;
  }
  std::size_t half = P.relator().size() / 2;
  for (std::size_t k = 0; k < w.size(); ++k) {
    Word rot = rotate(w, k);
    for (const Word& f : P.relator_forms()) {
      std::size_t m = half + 1;
      if (rot.size() < m || f.size() < m) continue;
      if (!std::equal(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(m), rot.begin()))
        continue;
      Word repl = inverse(Word(f.begin() + static_cast<std::ptrdiff_t>(m), f.end()));
      Word p(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
      pre = concat(pre, p);
      w = concat(repl, Word(rot.begin() + static_cast<std::ptrdiff_t>(m), rot.end()));
      return true;
    }
  }
  return did;
}

// Finds h with  u = h * target * h^-1  for conjugate words; target must be a
// cyclically Dehn-reduced representative.
Word conjugator_to(const GroupPresentation& P, const Word& u, const Word& target) {
  Word w = u, pre;
  while (reduce_step(P, w, pre)) {
  }
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (rotate(w, k) == target) {
      Word p(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
      return free_reduce(concat(pre, p));
    }
  }
  // Rare fallback: breadth-first search over short conjugators.
  std::deque<Word> queue{Word{}};
  std::unordered_set<std::string> seen{word_key(Word{})};
  while (!queue.empty()) {
    Word h = queue.front();
    queue.pop_front();
    if (elements_equal(P, u, concat(h, concat(target, inverse(h))))) return h;
    if (h.size() >= 8) continue;
    for (int l = 1; l <= P.alphabet(); ++l) {
      for (Letter c : {static_cast<Letter>(l), static_cast<Letter>(-l)}) {
        Word nh = concat(h, Word{c});
        if (nh.size() != h.size() + 1) continue;
        if (seen.insert(word_key(nh)).second) queue.push_back(nh);
      }
    }
  }
  throw construction_error("no conjugator to the pants-curve representative");
}

// Enumerates freely reduced words of the given length in canonical letter
// order.
void each_reduced_word(int alphabet, int len, const std::function<void(const Word&)>& f) {
  Word w;
  std::function<void()> rec = [&]() {
    if (static_cast<int>(w.size()) == len) {
      f(w);
      return;
    }
    for (int r = 0; r < 2 * alphabet; ++r) {
      Letter l = static_cast<Letter>((r / 2 + 1) * (r % 2 ? -1 : 1));
      if (!w.empty() && w.back() == inv(l)) continue;
      w.push_back(l);
      rec();
      w.pop_back();
    }
  };
  rec();
}

struct TripleFinder {
  const SurfaceModel& model;
  const GroupPresentation& pres;
  const std::vector<CyclicWord>& curves;
  std::vector<std::array<CyclicWord, 2>> canon_oriented;  // per curve: +1, -1

  TripleFinder(const SurfaceModel& m, const GroupPresentation& P,
               const std::vector<CyclicWord>& cs)
      : model(m), pres(P), curves(cs) {
    for (const CyclicWord& c : curves)
      canon_oriented.push_back({canonicalize_oriented(P, c.letters),
                                canonicalize_oriented(P, inverse(c.letters))});
  }

  Word core(int t, int s) const {
    return s > 0 ? curves[static_cast<std::size_t>(t)].letters
                 : inverse(curves[static_cast<std::size_t>(t)].letters);
  }

  // The pant lies on the left of each oriented boundary: the left side of an
  // axis oriented repelling -> attracting is the counterclockwise arc from
  // the attracting to the repelling endpoint.
  static bool mutually_left(const AxisData& a, const AxisData& b) {
    return arc_contains(a.attracting, a.repelling, b.attracting) &&
           arc_contains(a.attracting, a.repelling, b.repelling);
  }

  PantTriple find(int t1, int s1) const {
    Word g1 = core(t1, s1);
    AxisData ax1 = axis_data(evaluate(model, g1));
    for (int len = 0; len <= 6; ++len) {
      PantTriple found;
      bool have = false;
      each_reduced_word(pres.alphabet(), len, [&](const Word& w) {
        if (have) return;
        for (int t2 = 0; t2 < static_cast<int>(curves.size()) && !have; ++t2) {
          for (int s2 : {1, -1}) {
            Word g2 = concat(w, concat(core(t2, s2), inverse(w)));
            Word g3 = free_reduce(inverse(concat(g2, g1)));
            if (g3.empty()) continue;
            CyclicWord c3;
            try {
              c3 = canonicalize_oriented(pres, g3);
            } catch (const Error&) {
              continue;
            }
            int t3 = -1, s3 = 0;
            for (std::size_t u = 0; u < curves.size(); ++u) {
              if (c3 == canon_oriented[u][0]) { t3 = static_cast<int>(u); s3 = 1; }
              if (c3 == canon_oriented[u][1]) { t3 = static_cast<int>(u); s3 = -1; }
            }
            if (t3 < 0) continue;
            AxisData ax2, ax3;
            try {
              ax2 = axis_data(evaluate(model, g2));
              ax3 = axis_data(evaluate(model, g3));
            } catch (const Error&) {
              continue;
            }
            if (!mutually_left(ax1, ax2) || !mutually_left(ax1, ax3) ||
                !mutually_left(ax2, ax1) || !mutually_left(ax2, ax3) ||
                !mutually_left(ax3, ax1) || !mutually_left(ax3, ax2))
              continue;
            Word target3 = core(t3, s3);
            Word h3;
            try {
              h3 = conjugator_to(pres, g3, target3);
            } catch (const Error&) {
              continue;
            }
            found.slots[0] = PantSlot{g1, t1, s1, Word{}};
            found.slots[1] = PantSlot{g2, t2, s2, w};
            found.slots[2] = PantSlot{g3, t3, s3, h3};
            have = true;
            break;
          }
        }
      });
      if (have) return found;
    }
    throw construction_error("no pant triple found for the oriented boundary");
  }
};

}  // namespace

PantsDecomposition::PantsDecomposition(int genus, std::vector<CyclicWord> curves,
                                       std::vector<PantTriple> pants)
    : genus_(genus), curves_(std::move(curves)), pants_(std::move(pants)) {}

PantsDecomposition minimal_pants(const IntersectionEngine& engine, const LengthFn& length,
                                 int pool_max_len) {
  const GroupPresentation& P = engine.presentation();
  const SurfaceModel& model = engine.model();
  const int g = model.genus;
  const int target = 3 * g - 3;

  std::vector<CyclicWord> pool = enumerate_classes(P, pool_max_len);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> len(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) len[i] = length(pool[i]);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (std::abs(len[a] - len[b]) > 1e-9) return len[a] < len[b];
    return word_less(pool[a].letters, pool[b].letters);
  });

  std::vector<CyclicWord> chosen;
  for (std::size_t idx : order) {
    if (static_cast<int>(chosen.size()) == target) break;
    const CyclicWord& c = pool[idx];
    if (primitive_root(P, c).power != 1) continue;
    bool ok = true;
    for (const CyclicWord& d : chosen) {
      if (c == d || engine.geometric_intersection(c, d) != 0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (!engine.self_intersections(c).empty()) continue;
    chosen.push_back(c);
  }
  if (static_cast<int>(chosen.size()) != target)
    throw budget_error("class pool exhausted before completing the decomposition");

  TripleFinder finder(model, P, chosen);
  std::set<std::pair<int, int>> uncovered;
  for (int t = 0; t < target; ++t)
    for (int s : {1, -1}) uncovered.insert({t, s});
  std::vector<PantTriple> pants;
  while (!uncovered.empty()) {
    auto [t, s] = *uncovered.begin();
    PantTriple tri = finder.find(t, s);
    for (const PantSlot& slot : tri.slots) {
      auto it = uncovered.find({slot.curve, slot.sign});
      if (it == uncovered.end())
        throw construction_error("oriented boundary covered by two pants");
      uncovered.erase(it);
    }
    pants.push_back(std::move(tri));
  }
  if (static_cast<int>(pants.size()) != 2 * g - 2)
    throw construction_error("wrong number of pants");
  return PantsDecomposition(g, std::move(chosen), std::move(pants));
}

Triangulation build_triangulation(const SurfaceModel& model, const PantsDecomposition& pd) {
  GroupPresentation P(pd.genus());
  Triangulation tri;
  for (std::size_t pi = 0; pi < pd.pants().size(); ++pi) {
    const PantTriple& pant = pd.pants()[pi];
    Word prod = concat(pant.slots[2].element,
                       concat(pant.slots[1].element, pant.slots[0].element));
    if (!element_normal_form(P, prod).empty())
      throw relation_violation_error("boundary triple does not multiply to the identity");
    for (const PantSlot& slot : pant.slots) {
      Word expect = slot.sign > 0 ? pd.curves()[static_cast<std::size_t>(slot.curve)].letters
                                  : inverse(pd.curves()[static_cast<std::size_t>(slot.curve)].letters);
      if (!elements_equal(P, slot.element,
                          concat(slot.conjugator, concat(expect, inverse(slot.conjugator)))))
        throw relation_violation_error("slot conjugator does not witness the boundary class");
    }
    for (auto [i, j] : {std::pair<int, int>{0, 1}, {1, 2}, {2, 0}}) {
      TriEdge e;
      e.kind = TriEdge::Kind::Q;
      e.u = pant.slots[static_cast<std::size_t>(i)].element;
      e.v = pant.slots[static_cast<std::size_t>(j)].element;
      e.pant = static_cast<int>(pi);
      e.slots = {i, j};
      tri.qedges.push_back(std::move(e));
    }
  }
  for (std::size_t t = 0; t < pd.curves().size(); ++t) {
    TriEdge e;
    e.kind = TriEdge::Kind::P;
    e.u = pd.curves()[t].letters;
    e.v = pd.curves()[t].letters;
    e.curve = static_cast<int>(t);
    tri.pedges.push_back(std::move(e));
  }
  return tri;
}

// ---- pants complex ---------------------------------------------------------

struct PantsComplex::Impl {
  const IntersectionEngine& engine;
  SurfaceModel model;
  GroupPresentation pres;
  LetterMaps lm;
  PantsDecomposition pd;
  Triangulation tri;
  double r_poly, seg_reach, lift_reach;

  std::vector<Eigen::Matrix3d> move_T;
  std::vector<Word> move_word;
  struct BallElem {
    Eigen::Matrix3d T;
    Word word;
    double dist;
  };
  mutable std::vector<BallElem> ball;

  struct CurveCtx {
    Word word;
    Isometry iso;
    AxisData ax;
    Eigen::Matrix3d T;
    Vec3 fA, fR, fN;        // axis frame: null endpoints and unit pole
    double s0 = 1.0;        // sqrt(-2 mink(fA, fR))
    std::string canon_key;  // canonical class key, for the multiple test
  };
  std::vector<CurveCtx> curve;

  // Transversal-segment endpoints in Fermi coordinates around the curve axis
  // (axis parameter, distance, side): stable even when the axis lies far from
  // the base point, where explicit hyperboloid points lose all precision.
  struct SpiralFermi {
    double tp = 0, dp = 0, tm = 0, dm = 0;
    int sp = 1, sm = 1;
  };
  std::vector<SpiralFermi> fermi;

  // Vertex context of an oriented pants curve gamma = curve^s: the pant on
  // its left, and the two quotient-edge families incident to the repelling
  // fixed point (the fan of the vertex), expressed in the standard frame
  // where the oriented curve is the exact word gamma.
  struct Fan {
    int qedge = -1;
    int curve2 = 0, sign2 = 1;
    Word conj2;         // far selector = conj2 * curve2^sign2 * conj2^-1
    BoundaryPoint far;  // far endpoint angle
  };
  struct Ori {
    Word core;
    Isometry iso;
    AxisData ax;
    int pant = -1, slot = -1;
    BoundaryPoint vertex;  // repelling fixed point of core
    std::array<Fan, 2> fans;
  };
  std::vector<std::array<Ori, 2>> ori;  // [curve][0: +1, 1: -1]

  std::vector<SpiralData> spirals;

  // Shared pool of quotient-edge lifts near the fundamental polygon: each
  // base edge, its spiral-fan translates up to the truncation depth, then
  // all ball translates.  Endpoint selectors stay structured so that deep
  // spiral powers are only ever applied as iterated circle maps.
  struct PoolLift {
    int qedge = -1;
    Vec3 n;
    double adist = 0;
    std::array<BoundaryPoint, 2> ang;  // [0] center vertex, [1] far vertex
    std::array<PreMap, 2> pre;
    std::array<int, 2> cv{0, 0};
    std::array<int, 2> sg{1, 1};
  };
  mutable std::vector<PoolLift> qpool;
  struct PLift {
    Vec3 n;
    double adist = 0;
    int curve = 0;
  };
  mutable std::vector<PLift> ppool;
  mutable bool pools_built = false;

  Impl(const IntersectionEngine& eng, PantsDecomposition dec)
      : engine(eng),
        model(eng.model()),
        pres(model.genus),
        lm(model),
        pd(std::move(dec)),
        tri(build_triangulation(model, pd)) {
    r_poly = model.polygon_radius;
    seg_reach = kSegLen / 2 + r_poly + 0.25;
    lift_reach = seg_reach + 2 * kRadiusStep;
    for (std::size_t i = 0; i < model.pairings.size(); ++i) {
      move_T.push_back(so21(model.pairings[i]));
      move_word.push_back(model.pairing_words[i]);
      move_T.push_back(so21(model.pairings[i].inverse()));
      move_word.push_back(inverse(model.pairing_words[i]));
    }
    for (const CyclicWord& c : pd.curves()) {
      CurveCtx cc;
      cc.word = c.letters;
      cc.iso = evaluate(model, cc.word);
      cc.ax = axis_data(cc.iso);
      cc.T = so21(cc.iso);
      cc.fA = boundary_vec(cc.ax.attracting);
      cc.fR = boundary_vec(cc.ax.repelling);
      cc.fN = geodesic_normal(cc.ax.attracting, cc.ax.repelling);
      cc.s0 = std::sqrt(-2.0 * mink(cc.fA, cc.fR));
      cc.canon_key = word_key(canonicalize(pres, cc.word).letters);
      curve.push_back(std::move(cc));
    }
    build_ori();
    for (std::size_t t = 0; t < curve.size(); ++t)
      spirals.push_back(build_spiral(static_cast<int>(t)));
  }

  void build_ori() {
    ori.resize(curve.size());
    for (int t = 0; t < static_cast<int>(curve.size()); ++t) {
      for (int si = 0; si < 2; ++si) {
        int s = si == 0 ? 1 : -1;
        Ori o;
        o.core = s > 0 ? curve[static_cast<std::size_t>(t)].word
                       : inverse(curve[static_cast<std::size_t>(t)].word);
        o.iso = evaluate(model, o.core);
        o.ax = axis_data(o.iso);
        o.vertex = o.ax.repelling;
        for (std::size_t pi = 0; pi < pd.pants().size() && o.pant < 0; ++pi) {
          const PantTriple& pant = pd.pants()[pi];
          for (int k = 0; k < 3; ++k) {
            if (pant.slots[static_cast<std::size_t>(k)].curve == t &&
                pant.slots[static_cast<std::size_t>(k)].sign == s) {
              o.pant = static_cast<int>(pi);
              o.slot = k;
              break;
            }
          }
        }
        if (o.pant < 0) throw construction_error("oriented curve has no left pant");
        const PantTriple& pant = pd.pants()[static_cast<std::size_t>(o.pant)];
        const Word& h = pant.slots[static_cast<std::size_t>(o.slot)].conjugator;
        if (!elements_equal(pres, o.core,
                            concat(inverse(h),
                                   concat(pant.slots[static_cast<std::size_t>(o.slot)].element, h))))
          throw relation_violation_error("slot conjugation does not reach the standard frame");
        int fi = 0;
        for (std::size_t q = 0; q < tri.qedges.size(); ++q) {
          const TriEdge& e = tri.qedges[q];
          if (e.pant != o.pant) continue;
          int other = -1;
          if (e.slots[0] == o.slot) other = e.slots[1];
          if (e.slots[1] == o.slot) other = e.slots[0];
          if (other < 0) continue;
          const PantSlot& os = pant.slots[static_cast<std::size_t>(other)];
          Fan f;
          f.qedge = static_cast<int>(q);
          f.curve2 = os.curve;
          f.sign2 = os.sign;
          f.conj2 = free_reduce(concat(inverse(h), os.conjugator));
          Word fw = concat(inverse(h), concat(os.element, h));
          f.far = axis_data(evaluate(model, fw)).repelling;
          if (fi >= 2) throw construction_error("vertex has more than two incident edges");
          o.fans[static_cast<std::size_t>(fi++)] = std::move(f);
        }
        if (fi != 2) throw construction_error("vertex has fewer than two incident edges");
        ori[static_cast<std::size_t>(t)][static_cast<std::size_t>(si)] = std::move(o);
      }
    }
  }

  // Foot of the common perpendicular from an axis (normal n_ax) on the
  // geodesic with normal n_e; the two must be disjoint.
  static Vec3 perp_foot(const Vec3& n_ax, const Vec3& n_e) {
    double c = mink(n_ax, n_e);
    if (!(std::abs(c) > 1.0 + 1e-12))
      throw construction_error("link edge is not disjoint from the axis");
    return normalize_timelike(n_ax - c * n_e);
  }

  SpiralData build_spiral(int t) const {
    const CurveCtx& cc = curve[static_cast<std::size_t>(t)];
    Frame F = make_frame(cc.ax);
    auto link_edge = [&](const Ori& o) {
      // The two link neighbors of the vertex per period, ordered along the
      // axis; the chosen link edge joins the first pair.
      BoundaryPoint A = o.fans[0].far, B = o.fans[1].far;
      double ta = F.t(boundary_vec(A)), tb = F.t(boundary_vec(B));
      if (tb < ta) std::swap(A, B);
      return std::array<BoundaryPoint, 2>{A, B};
    };
    std::array<BoundaryPoint, 2> Em = link_edge(ori[static_cast<std::size_t>(t)][0]);
    std::array<BoundaryPoint, 2> Ep = link_edge(ori[static_cast<std::size_t>(t)][1]);
    Vec3 rm = perp_foot(F.N, geodesic_normal(Em[0], Em[1]));
    Vec3 rp = perp_foot(F.N, geodesic_normal(Ep[0], Ep[1]));

    // Orbit points gamma^k r for k in the search window.
    auto orbit = [&](const Vec3& r) {
      std::vector<Vec3> pts(2 * kOrbitWindow + 1);
      pts[kOrbitWindow] = r;
      Eigen::Matrix3d Ti = cc.T.inverse();
      for (int k = 1; k <= kOrbitWindow; ++k) {
        pts[static_cast<std::size_t>(kOrbitWindow + k)] =
            normalize_timelike(cc.T * pts[static_cast<std::size_t>(kOrbitWindow + k - 1)]);
        pts[static_cast<std::size_t>(kOrbitWindow - k)] =
            normalize_timelike(Ti * pts[static_cast<std::size_t>(kOrbitWindow - k + 1)]);
      }
      return pts;
    };
    std::vector<Vec3> op = orbit(rp), om = orbit(rm);
    double best = std::numeric_limits<double>::infinity();
    int bn = 0, bm = 0;
    for (int n = -kOrbitWindow; n <= kOrbitWindow; ++n) {
      for (int m = -kOrbitWindow; m <= kOrbitWindow; ++m) {
        double d = hyp_distance(op[static_cast<std::size_t>(kOrbitWindow + n)],
                                om[static_cast<std::size_t>(kOrbitWindow + m)]);
        bool better = d < best - 1e-12;
        if (!better && d < best + 1e-12) {
          if (std::abs(n - m) < std::abs(bn - bm) ||
              (std::abs(n - m) == std::abs(bn - bm) && n < bn))
            better = true;
        }
        if (better) {
          best = d;
          bn = n;
          bm = m;
        }
      }
    }
    if (!std::isfinite(best)) throw non_finite_mass_error("transversal segment has no mass");
    SpiralData sd;
    sd.curve = t;
    sd.n_plus = bn;
    sd.n_minus = bm;
    sd.p_plus = op[static_cast<std::size_t>(kOrbitWindow + bn)];
    sd.p_minus = om[static_cast<std::size_t>(kOrbitWindow + bm)];
    sd.segment_mass = best;

    auto translate_angle = [&](BoundaryPoint a, int k) {
      Isometry g = k < 0 ? cc.iso.inverse() : cc.iso;
      for (int i = 0; i < std::abs(k); ++i) a = apply(g, a);
      return a;
    };
    BoundaryPoint xp = translate_angle(Ep[0], bn), yp = translate_angle(Ep[1], bn);
    BoundaryPoint xm = translate_angle(Em[0], bm), ym = translate_angle(Em[1], bm);
    bool crossed;
    try {
      crossed = linked(xp, xm, yp, ym);
    } catch (const Error&) {
      throw construction_error("degenerate spiral endpoints");
    }
    if (crossed) std::swap(xm, ym);
    try {
      if (linked(xp, xm, yp, ym)) throw construction_error("spiral geodesics cross");
    } catch (const Error&) {
      throw construction_error("degenerate spiral endpoints");
    }
    sd.r1 = {std::array<BoundaryPoint, 2>{xp, xm}, std::array<BoundaryPoint, 2>{yp, ym}};
    return sd;
  }

  // ---- ball and shared lift pools --------------------------------------

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

  double angle_gap(BoundaryPoint a, BoundaryPoint b) const {
    double d = std::abs(a.angle - b.angle);
    return std::min(d, 2 * kPi - d);
  }

  void build_pools() const {
    if (pools_built) return;
    build_ball();
    const double max_nz = std::sinh(lift_reach);
    std::unordered_map<Vec3Key, bool, Vec3KeyHash> seen;

    // Pre-folded fan variants of every quotient edge.
    struct Variant {
      int qedge;
      Vec3 n;
      std::array<BoundaryPoint, 2> ang;
      std::array<PreMap, 2> pre;
      std::array<int, 2> cv, sg;
    };
    std::vector<Variant> vars;
    for (std::size_t q = 0; q < tri.qedges.size(); ++q) {
      const TriEdge& e = tri.qedges[q];
      const PantTriple& pant = pd.pants()[static_cast<std::size_t>(e.pant)];
      for (int side = 0; side < 2; ++side) {
        const PantSlot& cs = pant.slots[static_cast<std::size_t>(e.slots[static_cast<std::size_t>(side)])];
        const PantSlot& fs = pant.slots[static_cast<std::size_t>(e.slots[static_cast<std::size_t>(1 - side)])];
        Isometry ciso = evaluate(model, cs.element);
        AxisData cax = axis_data(ciso);
        BoundaryPoint a_c = cax.repelling;
        BoundaryPoint far0 = axis_data(evaluate(model, fs.element)).repelling;
        for (int dir : {1, -1}) {
         Isometry step = dir < 0 ? ciso.inverse() : ciso;
         BoundaryPoint a_f = far0;
         if (dir < 0) a_f = apply(step, a_f);
         for (int k = dir > 0 ? 0 : -1; std::abs(k) <= kSpiralDepth; k += dir) {
          if (k != 0 || side == 0) {  // the base edge itself only once
          if (angle_gap(a_f, cax.repelling) < kEndpointRes ||
              angle_gap(a_f, cax.attracting) < kEndpointRes)
            break;  // numerically on the accumulating axis: truncate the fan
          Vec3 nv = geodesic_normal(a_c, a_f);
          // Fold the foot of the base point into the polygon.
          Vec3 X = normalize_timelike(base_point() - mink(base_point(), nv) * nv);
          std::vector<int> moves;
          X = fold(X, moves);
          Word tau = moves_to_word(moves);
          Variant v;
          v.qedge = static_cast<int>(q);
          v.ang[0] = lm.map_angle(tau, a_c);
          v.ang[1] = lm.map_angle(tau, a_f);
          v.n = geodesic_normal(v.ang[0], v.ang[1]);
          v.pre[0] = PreMap{tau, Word{}, 0, cs.conjugator};
          v.pre[1] = PreMap{tau, cs.element, k, fs.conjugator};
          v.cv = {cs.curve, fs.curve};
          v.sg = {cs.sign, fs.sign};
          vars.push_back(std::move(v));
          }
          a_f = apply(step, a_f);
         }
        }
      }
    }
    for (const BallElem& h : ball) {
      for (const Variant& v : vars) {
        Vec3 n = h.T * v.n;
        if (std::abs(n[2]) > max_nz) continue;
        Vec3 key = sign_normalize(n);
        if (!seen.emplace(vec_key(key), true).second) continue;
        PoolLift lf;
        lf.qedge = v.qedge;
        lf.n = key;
        lf.adist = std::asinh(std::abs(n[2]));
        lf.ang[0] = lm.map_angle(h.word, v.ang[0]);
        lf.ang[1] = lm.map_angle(h.word, v.ang[1]);
        for (int eI = 0; eI < 2; ++eI) {
          lf.pre[static_cast<std::size_t>(eI)] = v.pre[static_cast<std::size_t>(eI)];
          lf.pre[static_cast<std::size_t>(eI)].lead =
              concat(h.word, v.pre[static_cast<std::size_t>(eI)].lead);
        }
        lf.cv = v.cv;
        lf.sg = v.sg;
        qpool.push_back(std::move(lf));
      }
    }

    // Pants-curve axis lifts.
    std::unordered_map<Vec3Key, bool, Vec3KeyHash> pseen;
    for (std::size_t t = 0; t < curve.size(); ++t) {
      const CurveCtx& cc = curve[t];
      Frame base = make_frame(cc.ax);
      double t_foot = base.t(base_point());
      std::vector<Vec3> bases;
      std::unordered_map<Vec3Key, bool, Vec3KeyHash> bseen;
      int nstep = std::max(1, static_cast<int>(std::ceil(cc.ax.length / kStepLen)));
      walk_axis(base, cc.ax.length, t_foot, nstep,
                [&](int, const Vec3&, const Vec3&, const Vec3& nf, double, const Word&) {
                  Vec3 n = sign_normalize(nf);
                  if (bseen.emplace(vec_key(n), true).second) bases.push_back(n);
                });
      for (const BallElem& h : ball) {
        for (const Vec3& b : bases) {
          Vec3 n = h.T * b;
          if (std::abs(n[2]) > max_nz) continue;
          n = sign_normalize(n);
          if (!pseen.emplace(vec_key(n), true).second) continue;
          ppool.push_back(PLift{n, std::asinh(std::abs(n[2])), static_cast<int>(t)});
        }
      }
    }
    pools_built = true;
  }

  // ---- folding and axis walking (same scheme as the crossing engine) ----

  Vec3 fold(Vec3 v, std::vector<int>& moves) const {
    while (true) {
      int bestm = -1;
      double bz = v[2] - 1e-12;
      for (std::size_t i = 0; i < move_T.size(); ++i) {
        double z = move_T[i].row(2).dot(v);
        if (z < bz) {
          bz = z;
          bestm = static_cast<int>(i);
        }
      }
      if (bestm < 0) return v;
      v = move_T[static_cast<std::size_t>(bestm)] * v;
      moves.push_back(bestm);
    }
  }
  Word moves_to_word(const std::vector<int>& moves) const {
    Word w;
    for (int mv : moves) w = concat(move_word[static_cast<std::size_t>(mv)], w);
    return w;
  }

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

  template <typename F>
  void walk_axis(const Frame& base, double span, double t_start, int nstep, F&& visit) const {
    double w = span / nstep;
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

  // ---- psi extraction ----------------------------------------------------

  struct Seg2 {
    Vec3 u, tang, n;
    double width = 0;
    Word tau;                   // folding word: tau * (global segment) = folded
    double t_mid = 0;           // global axis parameter of the midpoint
    BoundaryPoint att_f, rep_f; // folded ideal endpoints of the axis line
  };
  struct HitRec {
    int seg = 0;
    int lift = 0;
    double t = 0;
    std::array<bool, 2> node{false, false};
  };
  struct Win2 {
    Word rep;
    Frame base;
    double ell = 0;
    double t0 = 0;  // period is [t0, t0 + ell)
    std::vector<Seg2> segs;
    std::vector<HitRec> hits;                 // quotient-edge crossings, sorted
    std::vector<std::pair<double, int>> phits;  // pants-axis crossings (t, curve)
  };

  double t_of(const Seg2& sg, const Vec3& X) const {
    Vec3 Af = sg.u + sg.tang, Rf = sg.u - sg.tang;
    return sg.t_mid + 0.5 * std::log(mink(X, Rf) / mink(X, Af));
  }

  Win2 make_window(const Word& cw) const {
    Win2 W;
    W.rep = best_rotation(cw);
    AxisData ax = axis_data(evaluate(model, W.rep));
    W.base = make_frame(ax);
    W.ell = ax.length;
    double t_foot = W.base.t(base_point());
    W.t0 = t_foot + kWindowShift * W.ell;
    // The window covers one period plus its translate (for the wrap-around
    // binodal pair) plus neighbor margins on both sides.
    double start = W.t0 - 6.0;
    double span = 2 * W.ell + 12.0;
    int nseg = std::max(1, static_cast<int>(std::ceil(span / kSegLen)));
    double t_acc = start;
    walk_axis(W.base, span, start, nseg,
              [&](int, const Vec3& u, const Vec3& tang, const Vec3& n, double w, const Word& tau) {
                Seg2 s;
                s.u = u;
                s.tang = tang;
                s.n = n;
                s.width = w;
                s.tau = tau;
                s.t_mid = t_acc + w / 2;
                Vec3 A = u + tang, R = u - tang;
                s.att_f = normalize_angle(std::atan2(A[1], A[0]));
                s.rep_f = normalize_angle(std::atan2(R[1], R[0]));
                W.segs.push_back(std::move(s));
                t_acc += w;
              });
    for (std::size_t j = 0; j < W.segs.size(); ++j) {
      const Seg2& sg = W.segs[j];
      const double pre = std::sinh(sg.width / 2 + 0.05);
      for (std::size_t i = 0; i < qpool.size(); ++i) {
        const PoolLift& lf = qpool[i];
        if (std::abs(mink(sg.u, lf.n)) > pre) continue;
        double mv = mink(sg.n, lf.n);
        double q = 1.0 - mv * mv;
        if (!(q > 1e-12)) continue;
        Vec3 e = sg.n.cross(lf.n);
        Vec3 X(e[0], e[1], -e[2]);
        X /= std::sqrt(q);
        if (X[2] < 0) X = -X;
        double off = std::asinh(mink(X, sg.tang));
        if (off < -sg.width / 2 || off >= sg.width / 2) continue;
        if (lf.adist > seg_reach + 1e-9)
          throw saturation_error("crossing lift outside the saturation radius");
        double t = sg.t_mid + off;
        bool dup = false;
        for (auto it = W.hits.rbegin(); it != W.hits.rend(); ++it) {
          if (t - it->t > 1e-6) break;
          const Vec3& on = qpool[static_cast<std::size_t>(it->lift)].n;
          if (std::abs(it->t - t) < 1e-7 &&
              ((on - lf.n).cwiseAbs().maxCoeff() < 1e-6 ||
               (on + lf.n).cwiseAbs().maxCoeff() < 1e-6))
            dup = true;
        }
        if (!dup) W.hits.push_back(HitRec{static_cast<int>(j), static_cast<int>(i), t});
      }
      for (const PLift& lf : ppool) {
        if (std::abs(mink(sg.u, lf.n)) > pre) continue;
        double mv = mink(sg.n, lf.n);
        double q = 1.0 - mv * mv;
        if (!(q > 1e-12)) continue;
        Vec3 e = sg.n.cross(lf.n);
        Vec3 X(e[0], e[1], -e[2]);
        X /= std::sqrt(q);
        if (X[2] < 0) X = -X;
        double off = std::asinh(mink(X, sg.tang));
        if (off < -sg.width / 2 || off >= sg.width / 2) continue;
        if (lf.adist > seg_reach + 1e-9)
          throw saturation_error("pants-axis lift outside the saturation radius");
        double t = sg.t_mid + off;
        bool dup = false;
        for (auto it = W.phits.rbegin(); it != W.phits.rend(); ++it) {
          if (t - it->first > 1e-6) break;
          if (std::abs(it->first - t) < 1e-7 && it->second == lf.curve) dup = true;
        }
        if (!dup) W.phits.emplace_back(t, lf.curve);
      }
    }
    std::stable_sort(W.hits.begin(), W.hits.end(),
                     [](const HitRec& a, const HitRec& b) { return a.t < b.t; });
    std::stable_sort(W.phits.begin(), W.phits.end());
    return W;
  }

  // A hit endpoint is a node iff some other fan edge at the same ideal
  // vertex crosses the axis line; the fan is enumerated exactly from the
  // vertex's two incident quotient-edge families, transported by the
  // endpoint's structured selector (iterated circle maps only).
  bool is_node(const Win2& W, const HitRec& h, int end) const {
    const PoolLift& lf = qpool[static_cast<std::size_t>(h.lift)];
    const Seg2& sg = W.segs[static_cast<std::size_t>(h.seg)];
    const Ori& o = ori[static_cast<std::size_t>(lf.cv[static_cast<std::size_t>(end)])]
                      [lf.sg[static_cast<std::size_t>(end)] > 0 ? 0 : 1];
    BoundaryPoint vx = lf.ang[static_cast<std::size_t>(end)];
    BoundaryPoint own = lf.ang[static_cast<std::size_t>(1 - end)];
    for (const Fan& f : o.fans) {
      for (int dir : {1, -1}) {
        Isometry step = dir < 0 ? o.iso.inverse() : o.iso;
        BoundaryPoint a = f.far;
        if (dir < 0) a = apply(step, a);
        for (int k = dir > 0 ? 0 : 1; k <= kFanScan; ++k) {
          if (angle_gap(a, o.ax.repelling) < kEndpointRes ||
              angle_gap(a, o.ax.attracting) < kEndpointRes)
            break;
          BoundaryPoint m = lf.pre[static_cast<std::size_t>(end)].map_angle(lm, a);
          bool self = f.qedge == lf.qedge && angle_gap(m, own) < 1e-7;
          if (!self && angle_gap(m, vx) > kEndpointRes) {
            try {
              if (linked(sg.att_f, sg.rep_f, vx, m)) return true;
            } catch (const Error&) {
            }
          }
          a = apply(step, a);
        }
      }
    }
    return false;
  }

  // ---- exact endpoint identity --------------------------------------------

  Word end_word(const HitRec& h, int end) const {
    return qpool[static_cast<std::size_t>(h.lift)].pre[static_cast<std::size_t>(end)].word();
  }

  bool is_curve_power(int t, const Word& d) const {
    const Word& cw = curve[static_cast<std::size_t>(t)].word;
    if (d.empty()) return true;
    int kmax = static_cast<int>(d.size() / cw.size()) + 2;
    for (int dir : {1, -1}) {
      Word stepw = dir > 0 ? inverse(cw) : cw;
      Word cur = d;
      for (int k = 0; k < kmax; ++k) {
        cur = element_normal_form(pres, concat(cur, stepw));
        if (cur.empty()) return true;
      }
    }
    return false;
  }

  // Exact relation between two hit endpoints: with same_sign, whether they
  // are the same ideal vertex; without, whether their selectors are mutually
  // inverse (the endpoints are the two fixed points of one collar axis).
  // Both reduce to "the frames differ by a power of the pants curve".
  bool related_ends(const Win2& W, const HitRec& h1, int e1, const HitRec& h2, int e2,
                    bool same_sign) const {
    const PoolLift& l1 = qpool[static_cast<std::size_t>(h1.lift)];
    const PoolLift& l2 = qpool[static_cast<std::size_t>(h2.lift)];
    if (l1.cv[static_cast<std::size_t>(e1)] != l2.cv[static_cast<std::size_t>(e2)]) return false;
    if ((l1.sg[static_cast<std::size_t>(e1)] == l2.sg[static_cast<std::size_t>(e2)]) != same_sign)
      return false;
    Word rel = free_reduce(concat(W.segs[static_cast<std::size_t>(h1.seg)].tau,
                                  inverse(W.segs[static_cast<std::size_t>(h2.seg)].tau)));
    Word g1 = end_word(h1, e1), g2 = end_word(h2, e2);
    if (g1.size() + g2.size() + rel.size() > 600)
      throw saturation_error("endpoint selectors too deep for the identity test");
    Word D = element_normal_form(pres, concat(inverse(g1), concat(rel, g2)));
    return is_curve_power(l1.cv[static_cast<std::size_t>(e1)], D);
  }

  // ---- collar winding scans ------------------------------------------------

  // The collar element of a binodal pair: gamma = g * curve^s * g^-1 in the
  // folded frame of refseg.  All scans happen in the collar's standard frame
  // (the axis line is pulled back by g), so deep conjugators are applied
  // once, letter by letter, and the translate iteration is a single bounded
  // isometry per step.
  struct PairInfo {
    Word g;
    int s = 1;
    int curveT = 0;
    int refseg = 0;
  };
  struct CollarFrame {
    BoundaryPoint al, rl;
    Vec3 nL, A, R;
  };
  CollarFrame collar_frame(const Win2& W, const PairInfo& pc) const {
    const Seg2& sg = W.segs[static_cast<std::size_t>(pc.refseg)];
    Word gi = inverse(pc.g);
    CollarFrame cf;
    cf.al = lm.map_angle(gi, sg.att_f);
    cf.rl = lm.map_angle(gi, sg.rep_f);
    cf.nL = geodesic_normal(cf.al, cf.rl);
    cf.A = boundary_vec(cf.al);
    cf.R = boundary_vec(cf.rl);
    return cf;
  }
  double collar_t(const CollarFrame& cf, const Vec3& X) const {
    return 0.5 * std::log(mink(X, cf.R) / mink(X, cf.A));
  }

  long long scan_r1(const CollarFrame& cf, const PairInfo& pc, int& sign_out) const {
    const SpiralData& sd = spirals[static_cast<std::size_t>(pc.curveT)];
    const CurveCtx& cc = curve[static_cast<std::size_t>(pc.curveT)];
    long long total = 0;
    sign_out = 0;
    for (const auto& geo : sd.r1) {
      for (int dir : {1, -1}) {
        Isometry step = dir < 0 ? cc.iso.inverse() : cc.iso;
        BoundaryPoint a0 = geo[0], a1 = geo[1];
        if (dir < 0) {
          a0 = apply(step, a0);
          a1 = apply(step, a1);
        }
        long long seen = 0;
        int miss = 0, last_cross = -1;
        for (int k = dir > 0 ? 0 : 1; k <= 240; ++k) {
          bool cross = false;
          try {
            cross = linked(cf.al, cf.rl, a0, a1);
          } catch (const Error&) {
          }
          if (cross) {
            ++seen;
            miss = 0;
            last_cross = k;
            if (sign_out == 0) {
              try {
                Vec3 X = crossing_point(cf.nL, geodesic_normal(a0, a1));
                Vec3 X2 = normalize_timelike((pc.s > 0 ? cc.T : cc.T.inverse().eval()) * X);
                sign_out = collar_t(cf, X2) > collar_t(cf, X) ? 1 : -1;
              } catch (const Error&) {
              }
            }
          } else if (seen > 0 && ++miss > 25) {
            break;
          }
          a0 = apply(step, a0);
          a1 = apply(step, a1);
        }
        if (last_cross > 230)
          throw saturation_error("spiral-edge winding scan did not terminate");
        total += seen;
      }
    }
    return total;
  }

  long long scan_r2(const CollarFrame& cf, const PairInfo& pc) const {
    const SpiralData& sd = spirals[static_cast<std::size_t>(pc.curveT)];
    const CurveCtx& cc = curve[static_cast<std::size_t>(pc.curveT)];
    Eigen::Matrix3d Ti = cc.T.inverse();
    long long total = 0;
    for (int dir : {1, -1}) {
      const Eigen::Matrix3d& step = dir < 0 ? Ti : cc.T;
      Vec3 P = sd.p_plus, Q = sd.p_minus;
      if (dir < 0) {
        P = normalize_timelike(step * P);
        Q = normalize_timelike(step * Q);
      }
      long long seen = 0;
      int miss = 0, last_cross = -1;
      for (int k = dir > 0 ? 0 : 1; k <= 240; ++k) {
        bool cross = side_sign(P, cf.nL) * side_sign(Q, cf.nL) < 0;
        if (cross) {
          ++seen;
          miss = 0;
          last_cross = k;
        } else if (seen > 0 && ++miss > 25) {
          break;
        }
        P = normalize_timelike(step * P);
        Q = normalize_timelike(step * Q);
      }
      if (last_cross > 230)
        throw saturation_error("transversal-segment winding scan did not terminate");
      total += seen;
    }
    return total;
  }

  // ---- full extraction -----------------------------------------------------

  PsiCode extract(const CyclicWord& c, PsiStats& stats, PsiDetail* detail) const {
    build_pools();
    Win2 W = make_window(c.letters);
    auto& hits = W.hits;
    for (HitRec& h : hits) {
      h.node[0] = is_node(W, h, 0);
      h.node[1] = is_node(W, h, 1);
    }
    std::vector<int> pbin;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i].node[0] && hits[i].node[1] && hits[i].t >= W.t0 && hits[i].t < W.t0 + W.ell)
        pbin.push_back(static_cast<int>(i));
    }
    if (pbin.empty())
      throw saturation_error("no binodal edge found for a class off the pants curves");
    const int m = static_cast<int>(pbin.size());
    for (int hi : pbin) {
      if (hi < 1 || hi + 1 >= static_cast<int>(hits.size()))
        throw saturation_error("binodal edge at the window boundary");
    }
    // The wrap-around partner: the period translate of the first binodal.
    int wrap = -1;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (std::abs(hits[i].t - (hits[static_cast<std::size_t>(pbin[0])].t + W.ell)) < 1e-6 &&
          qpool[static_cast<std::size_t>(hits[i].lift)].qedge ==
              qpool[static_cast<std::size_t>(hits[static_cast<std::size_t>(pbin[0])].lift)].qedge)
        wrap = static_cast<int>(i);
    }
    if (wrap < 0 || wrap + 1 >= static_cast<int>(hits.size()))
      throw saturation_error("period translate of the first binodal edge not in the window");

    auto shared_with = [&](int hi, int hj) -> std::pair<int, int> {
      for (int ea = 0; ea < 2; ++ea)
        for (int eb = 0; eb < 2; ++eb)
          if (related_ends(W, hits[static_cast<std::size_t>(hi)], ea,
                           hits[static_cast<std::size_t>(hj)], eb, true))
            return {ea, eb};
      return {-1, -1};
    };
    auto side0 = [&](int hi, BoundaryPoint a) {
      const Seg2& sg = W.segs[static_cast<std::size_t>(hits[static_cast<std::size_t>(hi)].seg)];
      return arc_contains(sg.rep_f, sg.att_f, a);
    };
    auto type_of = [&](int hi) {
      auto sp = shared_with(hi, hi - 1);
      auto ss = shared_with(hi, hi + 1);
      if (sp.first < 0 || ss.first < 0)
        throw saturation_error("binodal neighbor without a shared endpoint");
      const PoolLift& lf = qpool[static_cast<std::size_t>(hits[static_cast<std::size_t>(hi)].lift)];
      bool pre_on_s0 = side0(hi, lf.ang[static_cast<std::size_t>(sp.first)]);
      bool suc_on_s0 = side0(hi, lf.ang[static_cast<std::size_t>(ss.first)]);
      if (pre_on_s0 == suc_on_s0)
        throw saturation_error("shared endpoints on the same side of the axis");
      return pre_on_s0 ? 'Z' : 'S';
    };

    PsiCode code;
    code.tuples.resize(static_cast<std::size_t>(m));
    std::vector<char> types(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      int hi = pbin[static_cast<std::size_t>(i)];
      types[static_cast<std::size_t>(i)] = type_of(hi);
      PsiTuple& tp = code.tuples[static_cast<std::size_t>(i)];
      tp.a = qpool[static_cast<std::size_t>(hits[static_cast<std::size_t>(hi - 1)].lift)].qedge;
      tp.b = qpool[static_cast<std::size_t>(hits[static_cast<std::size_t>(hi)].lift)].qedge;
      tp.c = qpool[static_cast<std::size_t>(hits[static_cast<std::size_t>(hi + 1)].lift)].qedge;
      tp.type = types[static_cast<std::size_t>(i)];
      if (tp.a == tp.b || tp.b == tp.c || tp.a == tp.c)
        throw saturation_error("binodal neighbors do not span the pant");
      if (tri.qedges[static_cast<std::size_t>(tp.a)].pant !=
              tri.qedges[static_cast<std::size_t>(tp.b)].pant ||
          tri.qedges[static_cast<std::size_t>(tp.b)].pant !=
              tri.qedges[static_cast<std::size_t>(tp.c)].pant)
        throw saturation_error("tuple edges straddle two pants");
    }

    stats.b = m;
    for (const auto& ph : W.phits)
      if (ph.first >= W.t0 && ph.first < W.t0 + W.ell) ++stats.p;
    if (detail) {
      detail->ell = W.ell;
      detail->pants_crossings.clear();
      detail->binodal_crossings.clear();
      detail->windings.clear();
      for (const auto& ph : W.phits)
        if (ph.first >= W.t0 && ph.first < W.t0 + W.ell)
          detail->pants_crossings.push_back(ph.first - W.t0);
      for (int hi : pbin)
        detail->binodal_crossings.push_back(hits[static_cast<std::size_t>(hi)].t - W.t0);
    }

    for (int i = 0; i < m; ++i) {
      int hi = pbin[static_cast<std::size_t>(i)];
      int hj = (i + 1 < m) ? pbin[static_cast<std::size_t>(i + 1)] : wrap;
      char Tj = (i + 1 < m) ? types[static_cast<std::size_t>(i + 1)] : types[0];
      bool same_vertex = types[static_cast<std::size_t>(i)] != Tj;
      PairInfo pc;
      bool found = false;
      for (int ea = 0; ea < 2 && !found; ++ea) {
        for (int eb = 0; eb < 2 && !found; ++eb) {
          if (related_ends(W, hits[static_cast<std::size_t>(hi)], ea,
                           hits[static_cast<std::size_t>(hj)], eb, same_vertex)) {
            const PoolLift& lf = qpool[static_cast<std::size_t>(hits[static_cast<std::size_t>(hi)].lift)];
            pc.curveT = lf.cv[static_cast<std::size_t>(ea)];
            pc.s = lf.sg[static_cast<std::size_t>(ea)];
            pc.g = end_word(hits[static_cast<std::size_t>(hi)], ea);
            pc.refseg = hits[static_cast<std::size_t>(hi)].seg;
            found = true;
          }
        }
      }
      if (!found) throw saturation_error("no collar element for a consecutive binodal pair");
      if (pc.g.size() > 200) throw saturation_error("collar conjugator too deep");
      CollarFrame cf = collar_frame(W, pc);
      int sgn = 0;
      long long n1 = scan_r1(cf, pc, sgn);
      long long t1 = n1 == 0 ? 0 : static_cast<long long>(sgn) * n1;
      long long w2 = scan_r2(cf, pc);
      code.tuples[static_cast<std::size_t>(i)].t1 = t1;
      stats.w1 += std::llabs(t1);
      stats.w2 += w2;
      if (detail) {
        WindingSegment ws;
        ws.t_lo = hits[static_cast<std::size_t>(hi - 1)].t - W.t0;
        ws.t_hi = hits[static_cast<std::size_t>(hj + 1)].t - W.t0;
        ws.w2 = w2;
        ws.curve_length = curve[static_cast<std::size_t>(pc.curveT)].ax.length;
        detail->windings.push_back(ws);
      }
    }
    return canonical_code(code);
  }
};

PantsComplex::PantsComplex(const IntersectionEngine& engine, PantsDecomposition pd)
    : impl_(std::make_unique<Impl>(engine, std::move(pd))) {}
PantsComplex::~PantsComplex() = default;

const PantsDecomposition& PantsComplex::pants() const { return impl_->pd; }
const Triangulation& PantsComplex::triangulation() const { return impl_->tri; }
const SpiralData& PantsComplex::spiral(int curve) const {
  return impl_->spirals.at(static_cast<std::size_t>(curve));
}

bool PantsComplex::is_pants_multiple(const CyclicWord& c) const {
  PrimitiveRoot pr = primitive_root(impl_->pres, c);
  std::string key = word_key(pr.root.letters);
  for (const Impl::CurveCtx& cc : impl_->curve)
    if (cc.canon_key == key) return true;
  return false;
}

PsiCode PantsComplex::psi(const CyclicWord& c) const {
  PsiStats stats;
  return psi(c, stats, nullptr);
}

PsiCode PantsComplex::psi(const CyclicWord& c, PsiStats& stats, PsiDetail* detail) const {
  stats = PsiStats{};
  CyclicWord cc = c.canonical ? c : canonicalize_oriented(impl_->pres, c.letters);
  if (is_pants_multiple(cc)) {
    if (detail) {
      *detail = PsiDetail{};
      detail->ell = axis_data(evaluate(impl_->model, cc.letters)).length;
    }
    return PsiCode{};
  }
  if (detail) *detail = PsiDetail{};
  return impl_->extract(cc, stats, detail);
}

PsiCode canonical_code(const PsiCode& code) {
  const std::size_t n = code.tuples.size();
  if (n <= 1) return code;
  auto key_at = [&](std::size_t r, std::size_t i) -> const PsiTuple& {
    return code.tuples[(r + i) % n];
  };
  auto tless = [](const PsiTuple& x, const PsiTuple& y) {
    return std::tie(x.a, x.b, x.c, x.type, x.t1) < std::tie(y.a, y.b, y.c, y.type, y.t1);
  };
  std::size_t best = 0;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      if (tless(key_at(r, i), key_at(best, i))) {
        best = r;
        break;
      }
      if (tless(key_at(best, i), key_at(r, i))) break;
    }
  }
  PsiCode out;
  out.tuples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.tuples.push_back(key_at(best, i));
  return out;
}

std::string code_key(const PsiCode& code) {
  std::ostringstream os;
  for (const PsiTuple& t : code.tuples)
    os << t.a << '.' << t.b << '.' << t.c << '.' << t.type << '.' << t.t1 << ';';
  return os.str();
}

// ---- admissibility ----------------------------------------------------------

namespace {

char flip_type(char t) { return t == 'Z' ? 'S' : 'Z'; }

// Pant/slot lookup tables derived from the public triangulation.
struct StateTables {
  const Triangulation& tri;
  const PantsDecomposition& pd;

  StateTables(const PantsComplex& pc) : tri(pc.triangulation()), pd(pc.pants()) {}

  int pant_of(int e) const { return tri.qedges[static_cast<std::size_t>(e)].pant; }

  // Common slot index of two quotient edges of one pant.
  int shared_slot(int e1, int e2) const {
    const TriEdge& a = tri.qedges[static_cast<std::size_t>(e1)];
    const TriEdge& b = tri.qedges[static_cast<std::size_t>(e2)];
    if (a.pant != b.pant) throw construction_error("edges lie in different pants");
    for (int s : a.slots)
      for (int t : b.slots)
        if (s == t) return s;
    throw construction_error("edges share no boundary slot");
  }

  // The two edges of pant p incident to slot k (ascending edge id) and the
  // opposite edge.
  void slot_edges(int p, int k, int& e1, int& e2, int& opp) const {
    e1 = e2 = opp = -1;
    for (std::size_t q = 0; q < tri.qedges.size(); ++q) {
      const TriEdge& e = tri.qedges[q];
      if (e.pant != p) continue;
      if (e.slots[0] == k || e.slots[1] == k) {
        if (e1 < 0)
          e1 = static_cast<int>(q);
        else
          e2 = static_cast<int>(q);
      } else {
        opp = static_cast<int>(q);
      }
    }
    if (e1 < 0 || e2 < 0 || opp < 0) throw construction_error("pant edge table incomplete");
  }

  // The starred edges of a state: the pair (b, c) shares a boundary slot;
  // the opposite side of that oriented boundary selects a slot of the other
  // pant, whose incident edges and opposite edge form the starred triple.
  void star(int b, int c, int& bs, int& cs, int& as) const {
    int p = pant_of(b);
    int k = shared_slot(b, c);
    const PantSlot& slot = pd.pants()[static_cast<std::size_t>(p)].slots[static_cast<std::size_t>(k)];
    int p2 = -1, k2 = -1;
    for (std::size_t pi = 0; pi < pd.pants().size(); ++pi) {
      for (int s = 0; s < 3; ++s) {
        const PantSlot& o = pd.pants()[pi].slots[static_cast<std::size_t>(s)];
        if (o.curve == slot.curve && o.sign == -slot.sign &&
            !(static_cast<int>(pi) == p && s == k)) {
          p2 = static_cast<int>(pi);
          k2 = s;
        }
      }
    }
    if (p2 < 0) throw construction_error("no opposite boundary slot");
    slot_edges(p2, k2, bs, cs, as);
  }
};

}  // namespace

std::vector<PsiState> psi_states(const PantsComplex& pc) {
  const Triangulation& tri = pc.triangulation();
  std::vector<PsiState> out;
  int npants = 0;
  for (const TriEdge& e : tri.qedges) npants = std::max(npants, e.pant + 1);
  for (int p = 0; p < npants; ++p) {
    std::vector<int> es;
    for (std::size_t q = 0; q < tri.qedges.size(); ++q)
      if (tri.qedges[q].pant == p) es.push_back(static_cast<int>(q));
    std::sort(es.begin(), es.end());
    std::vector<std::array<int, 3>> perms;
    std::array<int, 3> idx{0, 1, 2};
    do {
      perms.push_back(idx);
    } while (std::next_permutation(idx.begin(), idx.end()));
    for (const auto& pm : perms)
      for (char T : {'Z', 'S'})
        out.push_back(PsiState{es[static_cast<std::size_t>(pm[0])],
                               es[static_cast<std::size_t>(pm[1])],
                               es[static_cast<std::size_t>(pm[2])], T});
  }
  return out;
}

std::array<PsiState, 4> psi_successors(const PantsComplex& pc, const PsiState& s) {
  StateTables st(pc);
  int bs = 0, cs = 0, as = 0;
  st.star(s.b, s.c, bs, cs, as);
  return {PsiState{s.b, s.c, s.a, flip_type(s.type)},
          PsiState{s.c, s.b, s.a, flip_type(s.type)},
          PsiState{bs, cs, as, s.type},
          PsiState{cs, bs, as, s.type}};
}

bool validate_admissible(const PantsComplex& pc, const PsiCode& code, std::string* reason) {
  auto fail = [&](const std::string& r) {
    if (reason) *reason = r;
    return false;
  };
  if (code.tuples.empty()) return true;  // pants-curve marker
  const Triangulation& tri = pc.triangulation();
  const int nq = static_cast<int>(tri.qedges.size());
  for (std::size_t i = 0; i < code.tuples.size(); ++i) {
    const PsiTuple& t = code.tuples[i];
    if (t.a < 0 || t.a >= nq || t.b < 0 || t.b >= nq || t.c < 0 || t.c >= nq)
      return fail("tuple " + std::to_string(i) + ": edge id out of range");
    if (t.a == t.b || t.b == t.c || t.a == t.c)
      return fail("tuple " + std::to_string(i) + ": edges not distinct");
    if (tri.qedges[static_cast<std::size_t>(t.a)].pant !=
            tri.qedges[static_cast<std::size_t>(t.b)].pant ||
        tri.qedges[static_cast<std::size_t>(t.b)].pant !=
            tri.qedges[static_cast<std::size_t>(t.c)].pant)
      return fail("tuple " + std::to_string(i) + ": edges straddle pants");
    if (t.type != 'Z' && t.type != 'S')
      return fail("tuple " + std::to_string(i) + ": unknown type");
  }
  for (std::size_t i = 0; i < code.tuples.size(); ++i) {
    const PsiTuple& cur = code.tuples[i];
    const PsiTuple& nxt = code.tuples[(i + 1) % code.tuples.size()];
    PsiState scur{cur.a, cur.b, cur.c, cur.type};
    PsiState snxt{nxt.a, nxt.b, nxt.c, nxt.type};
    auto succ = psi_successors(pc, scur);
    if (std::find(succ.begin(), succ.end(), snxt) == succ.end())
      return fail("transition " + std::to_string(i) + " -> " +
                  std::to_string((i + 1) % code.tuples.size()) + " not admissible");
  }
  return true;
}

AdmissibleCount count_admissible(const PantsComplex& pc, int i) {
  using boost::multiprecision::cpp_int;
  if (i < 1) throw config_error("sequence length must be positive");
  std::vector<PsiState> states = psi_states(pc);
  const int N = static_cast<int>(states.size());
  const int genus = pc.pants().genus();

  AdmissibleCount out;
  out.bound_denominator = i;
  cpp_int numer = 24 * genus - 24;
  for (int k = 1; k < i; ++k) numer *= 4;
  {
    std::ostringstream os;
    os << numer;
    out.bound_numerator = os.str();
  }

  cpp_int exact;
  if (i == 1) {
    exact = N;  // single tuples: no wrap-around constraint
  } else {
    auto idx_of = [&](const PsiState& s) {
      for (int k = 0; k < N; ++k)
        if (states[static_cast<std::size_t>(k)] == s) return k;
      throw construction_error("successor outside the state alphabet");
    };
    using Mat = std::vector<std::vector<cpp_int>>;
    Mat M(static_cast<std::size_t>(N), std::vector<cpp_int>(static_cast<std::size_t>(N), 0));
    for (int k = 0; k < N; ++k)
      for (const PsiState& s : psi_successors(pc, states[static_cast<std::size_t>(k)]))
        M[static_cast<std::size_t>(k)][static_cast<std::size_t>(idx_of(s))] += 1;
    auto mul = [&](const Mat& A, const Mat& B) {
      Mat C(static_cast<std::size_t>(N), std::vector<cpp_int>(static_cast<std::size_t>(N), 0));
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
          if (A[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == 0) continue;
          for (int c = 0; c < N; ++c)
            C[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] +=
                A[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                B[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
        }
      return C;
    };
    std::vector<cpp_int> trace(static_cast<std::size_t>(i + 1), 0);
    Mat P = M;
    for (int e = 1; e <= i; ++e) {
      cpp_int tr = 0;
      for (int a = 0; a < N; ++a) tr += P[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)];
      trace[static_cast<std::size_t>(e)] = tr;
      if (e < i) P = mul(P, M);
    }
    auto phi = [](int n) {
      int r = n;
      for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
          r -= r / p;
          while (n % p == 0) n /= p;
        }
      }
      if (n > 1) r -= r / n;
      return r;
    };
    cpp_int total = 0;
    for (int d = 1; d <= i; ++d)
      if (i % d == 0) total += phi(d) * trace[static_cast<std::size_t>(i / d)];
    if (total % i != 0) throw construction_error("cyclic count is not integral");
    exact = total / i;
  }
  {
    std::ostringstream os;
    os << exact;
    out.exact = os.str();
  }
  out.within_bound = exact * i <= numer;
  return out;
}

}  // namespace surf
