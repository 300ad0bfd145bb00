#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "surf/measure.hpp"

using namespace surf;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryPoint pt(double a) { return normalize_angle(a); }

double circ_dist(BoundaryPoint a, BoundaryPoint b) {
  double d = std::abs(a.angle - b.angle);
  return std::min(d, 2 * kPi - d);
}

Word random_word(std::mt19937& rng, int genus, int len) {
  std::uniform_int_distribution<int> d(1, 2 * genus);
  std::bernoulli_distribution sign(0.5);
  Word w;
  while (static_cast<int>(w.size()) < len) {
    Letter l = static_cast<Letter>(d(rng) * (sign(rng) ? 1 : -1));
    if (!w.empty() && l == inv(w.back())) continue;
    w.push_back(l);
  }
  return w;
}

// Hyperbolic words whose attracting points are pairwise separated.
std::vector<Word> separated_pool(const SurfaceModel& m, std::mt19937& rng, int count,
                                 double min_sep = 0.25) {
  std::vector<Word> pool;
  std::vector<BoundaryPoint> pts;
  std::uniform_int_distribution<int> len(2, 5);
  while (static_cast<int>(pool.size()) < count) {
    Word w = random_word(rng, m.genus, len(rng));
    Isometry g = evaluate(m, w);
    if (!g.hyperbolic()) continue;
    AxisData ax = axis_data(g);
    bool ok = true;
    for (BoundaryPoint p : pts)
      if (circ_dist(p, ax.attracting) < min_sep) ok = false;
    if (!ok) continue;
    pool.push_back(w);
    pts.push_back(ax.attracting);
  }
  return pool;
}

CrossRatioFn admitted_liouville() {
  CrossRatioFn B = liouville_fn();
  std::vector<BoundaryPoint> seed;
  for (int k = 0; k < 7; ++k) seed.push_back(pt(0.3 + 0.8 * k));
  admit_cross_ratio(B, seed);
  return B;
}

// A box with both arcs non-degenerate and closures disjoint.
Box random_box(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.5);
  double a = std::uniform_real_distribution<double>(0.0, 2 * kPi)(rng);
  double s1 = u(rng), g1 = u(rng), s2 = u(rng);
  return Box{Arc{pt(a), pt(a + s1)}, Arc{pt(a + s1 + g1), pt(a + s1 + g1 + s2)}};
}

// Auxiliary word for flag-family periods: its attracting point z sits at
// moderate distance from the repelling fixed point of gw, so that g z lands
// O(1) from the attracting point instead of exp(-ell) close (a generic z
// compresses the box endpoints below the determinant noise floor).
Word choose_aux(const SurfaceModel& m, const Word& gw, std::mt19937& rng) {
  AxisData ax = axis_data(evaluate(m, gw));
  Isometry g = evaluate(m, gw);
  while (true) {
    Word cand = random_word(rng, m.genus, 2 + static_cast<int>(rng() % 3));
    Isometry h = evaluate(m, cand);
    if (!h.hyperbolic()) continue;
    BoundaryPoint z = axis_data(h).attracting;
    if (circ_dist(z, ax.repelling) < 0.05 || circ_dist(z, ax.repelling) > 0.6)
      continue;
    if (circ_dist(z, ax.attracting) < 0.6) continue;
    BoundaryPoint gz = apply(g, z);
    double sep = 10;
    for (BoundaryPoint q : {ax.attracting, ax.repelling, z})
      sep = std::min(sep, circ_dist(gz, q));
    if (sep > 0.05) return cand;
  }
}

}  // namespace

TEST_CASE("arc algebra: containment, extent, intersection pieces") {
  Arc a{pt(1.0), pt(3.0)};
  CHECK(arc_contains(a, pt(1.0)));   // closed end
  CHECK(!arc_contains(a, pt(3.0)));  // open end
  CHECK(arc_contains(a, pt(2.0)));
  CHECK(!arc_contains(a, pt(4.0)));
  CHECK(arc_extent(a) == Approx(2.0));
  CHECK(arc_empty(Arc{pt(1.0), pt(1.0)}));
  CHECK(!arc_contains(Arc{pt(1.0), pt(1.0)}, pt(1.0)));

  // Wrap-around arc.
  Arc w{pt(5.5), pt(0.5)};
  CHECK(arc_contains(w, pt(6.0)));
  CHECK(arc_contains(w, pt(0.2)));
  CHECK(!arc_contains(w, pt(2.0)));
  CHECK(arc_extent(w) == Approx(2 * kPi - 5.0));

  // Intersections: disjoint, nested, single overlap, two pieces.
  CHECK(arc_intersection(a, Arc{pt(3.5), pt(5.0)}).empty());
  auto nested = arc_intersection(a, Arc{pt(1.5), pt(2.5)});
  REQUIRE(nested.size() == 1);
  CHECK(arc_extent(nested[0]) == Approx(1.0));
  auto half = arc_intersection(a, Arc{pt(2.0), pt(4.0)});
  REQUIRE(half.size() == 1);
  CHECK(half[0].from.angle == Approx(2.0));
  CHECK(half[0].to.angle == Approx(3.0));
  // A wide arc meeting both ends of `mid` in two pieces.
  Arc mid{pt(1.0), pt(5.0)};
  auto two = arc_intersection(mid, Arc{pt(4.0), pt(2.0)});
  REQUIRE(two.size() == 2);
  CHECK(arc_extent(two[0]) + arc_extent(two[1]) == Approx(2.0));

  // Adjacent arcs: disjoint as sets, closures touch.
  Arc b{pt(3.0), pt(4.0)};
  CHECK(arcs_disjoint(a, b));
  CHECK(!arc_closures_disjoint(a, b));
  CHECK(arc_closures_disjoint(a, Arc{pt(3.5), pt(4.0)}));
}

TEST_CASE("axiom battery gates evaluators; liouville passes, corrupted fails") {
  CrossRatioFn B = liouville_fn();
  CHECK(!B.verified);
  // Unverified evaluators are rejected everywhere.
  Box b{Arc{pt(0.0), pt(1.0)}, Arc{pt(2.0), pt(3.0)}};
  CHECK_THROWS_AS(box_mass(B, b), Error);

  std::vector<BoundaryPoint> seed;
  for (int k = 0; k < 6; ++k) seed.push_back(pt(0.1 + 1.0 * k));
  admit_cross_ratio(B, seed);
  CHECK(B.verified);
  CHECK(box_mass(B, b).finite);

  // Breaking additivity is caught.
  CrossRatioFn bad = liouville_fn();
  auto inner = bad.eval;
  bad.eval = [inner](BoundaryPoint x, BoundaryPoint y, BoundaryPoint z,
                     BoundaryPoint w) { return inner(x, y, z, w) + 1e-3; };
  CHECK_THROWS_AS(admit_cross_ratio(bad, seed), Error);

  CHECK_THROWS_AS(admit_cross_ratio(B, {pt(0.0), pt(1.0), pt(2.0), pt(3.0)}), Error);
}

TEST_CASE("box mass: degenerate, infinite and additive cases") {
  CrossRatioFn B = admitted_liouville();
  std::mt19937 rng(31);
  // Point arc carries no mass.
  CHECK(box_mass(B, Box{Arc{pt(0.0), pt(1.0)}, Arc{pt(2.0), pt(2.0)}}).value == 0.0);
  // I = J and shared closure endpoints are infinite.
  Arc I{pt(0.0), pt(1.0)};
  CHECK(!box_mass(B, Box{I, I}).finite);
  CHECK(!box_mass(B, Box{I, Arc{pt(1.0), pt(2.0)}}).finite);
  CHECK(!box_mass(B, Box{I, Arc{pt(2.0), pt(0.0)}}).finite);
  // Overlapping arcs are inadmissible.
  CHECK_THROWS_AS(box_mass(B, Box{I, Arc{pt(0.5), pt(2.0)}}), Error);

  for (int trial = 0; trial < 50; ++trial) {
    Box b = random_box(rng);
    Mass m = box_mass(B, b);
    REQUIRE(m.finite);
    CHECK(m.value > 0.0);
    // Splitting I at an interior point is additive.
    double cut = 0.4 * arc_extent(b.I);
    Arc i1{b.I.from, pt(b.I.from.angle + cut)}, i2{i1.to, b.I.to};
    Mass m1 = box_mass(B, Box{i1, b.J}), m2 = box_mass(B, Box{i2, b.J});
    CHECK(m1.value + m2.value == Approx(m.value).epsilon(1e-9));
  }
}

TEST_CASE("liouville evaluator agrees with the geometric box mass") {
  CrossRatioFn B = admitted_liouville();
  std::mt19937 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    Box b = random_box(rng);
    CHECK(box_mass(B, b).value ==
          Approx(liouville_box_mass(b.I, b.J)).epsilon(1e-12));
  }
}

TEST_CASE("complement: nine-box and two-box lists verified by sampling") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  Box b = random_box(rng);
  AdmissibleList comp = complement(b);
  CHECK(comp.boxes().size() == 9);
  CHECK(comp.pairwise_disjoint());

  Arc I{pt(1.0), pt(2.5)};
  AdmissibleList diag = complement(Box{I, I});
  CHECK(diag.boxes().size() == 2);
  CHECK(diag.pairwise_disjoint());

  for (int s = 0; s < 1000; ++s) {
    BoundaryPoint x = pt(u(rng)), y = pt(u(rng));
    if (circ_dist(x, y) < 1e-12) continue;
    // Exactly one of box / complement contains each geodesic, and at most
    // one complement box does (disjointness realized pointwise).
    CHECK(box_contains(b, x, y) != list_contains(comp, x, y));
    int hits = 0;
    for (const Box& cb : comp.boxes())
      if (box_contains(cb, x, y)) ++hits;
    CHECK(hits <= 1);
    CHECK(box_contains(Box{I, I}, x, y) != list_contains(diag, x, y));
  }
}

TEST_CASE("intersection: disjoint lists verified by sampling, mass monotone") {
  CrossRatioFn B = admitted_liouville();
  std::mt19937 rng(34);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  // Disjoint supports give the empty list.
  Box far1{Arc{pt(0.0), pt(0.5)}, Arc{pt(1.0), pt(1.5)}};
  Box far2{Arc{pt(3.0), pt(3.5)}, Arc{pt(4.0), pt(4.5)}};
  CHECK(intersect(far1, far2).boxes().empty());
  // Idempotence at mass level.
  Mass m1 = box_mass(B, far1);
  CHECK(list_mass(B, intersect(far1, far1)).value == Approx(m1.value).epsilon(1e-12));

  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Box b1 = random_box(rng), b2 = random_box(rng);
    if (trial % 3 == 0) b2 = Box{b2.I, b2.I};  // exercise the diagonal case
    AdmissibleList inter = intersect(b1, b2);
    CHECK(inter.boxes().size() <= 8);
    CHECK(inter.pairwise_disjoint());
    for (int s = 0; s < 1000; ++s) {
      BoundaryPoint x = pt(u(rng)), y = pt(u(rng));
      bool in_both = box_contains(b1, x, y) && box_contains(b2, x, y);
      CHECK(in_both == list_contains(inter, x, y));
    }
    // Premeasure monotonicity when everything is finite.
    Mass mi = list_mass(B, inter);
    Mass mb = box_mass(B, b1);
    if (mi.finite && mb.finite) {
      CHECK(mb.value >= mi.value - 1e-12);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("list mass: refinement independence and disjointness guard") {
  CrossRatioFn B = admitted_liouville();
  std::mt19937 rng(35);
  std::uniform_real_distribution<double> cutpos(0.2, 0.8);
  std::uniform_int_distribution<int> parts(1, 4);
  CHECK(list_mass(B, AdmissibleList{}).value == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    Box b = random_box(rng);
    // Random refinement: split I into <=4 pieces and J into <=4 pieces.
    auto split = [&](const Arc& a) {
      int k = parts(rng);
      std::vector<double> cuts{0.0};
      for (int j = 1; j < k; ++j) cuts.push_back(cutpos(rng));
      cuts.push_back(1.0);
      std::sort(cuts.begin(), cuts.end());
      std::vector<Arc> out;
      double len = arc_extent(a);
      for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
        out.push_back(Arc{pt(a.from.angle + cuts[j] * len),
                          pt(a.from.angle + cuts[j + 1] * len)});
      return out;
    };
    std::vector<Box> ref;
    for (const Arc& i : split(b.I))
      for (const Arc& j : split(b.J)) ref.push_back(Box{i, j});
    AdmissibleList list(ref);
    REQUIRE(list.pairwise_disjoint());
    CHECK(list_mass(B, list).value ==
          Approx(box_mass(B, b).value).epsilon(1e-9));
  }

  // Overlapping boxes are rejected.
  Box b{Arc{pt(0.0), pt(1.0)}, Arc{pt(2.0), pt(3.0)}};
  Box overlap{Arc{pt(0.5), pt(1.5)}, Arc{pt(2.5), pt(3.5)}};
  AdmissibleList badlist({b, overlap});
  CHECK(!badlist.pairwise_disjoint());
  CHECK_THROWS_AS(list_mass(B, badlist), Error);

  // An infinite member short-circuits the sum to the infinity marker.
  Arc I{pt(4.0), pt(5.0)};
  AdmissibleList withinf({b, Box{I, I}});
  REQUIRE(withinf.pairwise_disjoint());
  CHECK(!list_mass(B, withinf).finite);
}

TEST_CASE("sigma-finite cover boxes have finite mass") {
  CrossRatioFn B = admitted_liouville();
  for (int m = 1; m <= 8; ++m) {
    double w = 1.0 / m;
    for (double p = 0.0; p < 2 * kPi - 2 * w - 0.2; p += 1.1) {
      Arc Ip{pt(p - w / 2), pt(p + w / 2)};
      Arc Iq{pt(p + w + 0.1), pt(p + 2 * w + 0.1)};
      if (!arc_closures_disjoint(Ip, Iq)) continue;
      CHECK(box_mass(B, Box{Ip, Iq}).finite);
    }
  }
}

TEST_CASE("continuity from inside: compact shrink loses arbitrarily little") {
  CrossRatioFn B = admitted_liouville();
  Box b{Arc{pt(0.0), pt(1.2)}, Arc{pt(2.0), pt(3.5)}};
  double full = box_mass(B, b).value;
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    // Shrink each arc by a margin chosen small enough for the target.
    double margin = eps / 10;
    Box shrunk{Arc{pt(margin), pt(1.2 - margin)},
               Arc{pt(2.0 + margin), pt(3.5 - margin)}};
    double deficit = full - box_mass(B, shrunk).value;
    CHECK(deficit >= -1e-12);
    CHECK(deficit < eps);
  }
}

TEST_CASE("period via boxes: Liouville mass is the hyperbolic length") {
  SurfaceModel m = build_model(2);
  GroupPresentation P(2);
  CrossRatioFn B = admitted_liouville();
  std::mt19937 rng(36);
  for (int trial = 0; trial < 25; ++trial) {
    Word w = random_word(rng, 2, 2 + trial % 3);
    if (!evaluate(m, w).hyperbolic()) continue;
    CyclicWord c = canonicalize_oriented(P, w);
    AxisData ax = axis_data(evaluate(m, w));
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    double p1 = 0.0, p2 = 0.0;
    int found = 0;
    while (found < 2) {
      BoundaryPoint z = pt(u(rng));
      if (circ_dist(z, ax.attracting) < 1e-2 || circ_dist(z, ax.repelling) < 1e-2)
        continue;
      (found == 0 ? p1 : p2) = period_via_boxes(B, m, c, z);
      ++found;
    }
    CHECK(p1 == Approx(ax.length).epsilon(1e-9));
    CHECK(p2 == Approx(p1).epsilon(1e-9));  // independence of z
  }
  // Fixed-point collision is refused.
  Word w = parse_word("a1", 2);
  CyclicWord c = canonicalize_oriented(P, w);
  CHECK_THROWS_AS(period_via_boxes(B, m, c, axis_data(evaluate(m, w)).attracting),
                  Error);
}

TEST_CASE("period via boxes: Hitchin and maximal evaluators match lengths") {
  SurfaceModel m = build_model(2);
  GroupPresentation P(2);
  std::mt19937 rng(37);
  std::vector<Word> pool = separated_pool(m, rng, 8);
  // Periods of short elements only: with a generic auxiliary point the
  // box endpoints compress like exp(-ell), and the stacked determinants
  // need separation^(i(n-i)) above the noise floor.
  std::vector<Word> gws;
  while (gws.size() < 4) {
    Word w = random_word(rng, 2, 2 + static_cast<int>(gws.size()) % 2);
    Isometry g = evaluate(m, w);
    if (!g.hyperbolic() || axis_data(g).length >= 5.0) continue;
    // The canonical representative: period_via_boxes works on its axis,
    // whose endpoints must be well separated or no auxiliary point fits.
    Word canon = canonicalize_oriented(P, w).letters;
    AxisData ax = axis_data(evaluate(m, canon));
    if (circ_dist(ax.attracting, ax.repelling) < 0.7) continue;
    bool fresh = true;
    for (const Word& prev : gws)
      if (canonicalize(P, prev) == canonicalize(P, w)) fresh = false;
    if (fresh) gws.push_back(canon);
  }

  for (int n : {3, 4}) {
    LinearRep r = sym_power_rep(m, n);
    for (int i = 1; i < n; ++i) {
      for (const Word& gw : gws) {
        Word zw = choose_aux(m, gw, rng);
        BoundaryPoint z = axis_data(evaluate(m, zw)).attracting;
        Word gzw = concat(gw, zw);  // g z = attracting point of (g zw g^-1)
        gzw = concat(gzw, inverse(gw));
        std::vector<FlagPoint> reg = {
            fixed_flag(m, r, gw, true), fixed_flag(m, r, gw, false),
            fixed_flag(m, r, zw, true), fixed_flag(m, r, gzw, true)};
        // Seed the axiom battery with well-separated registered points.
        std::vector<FlagPoint> seedreg = reg;
        for (const Word& cand : pool) {
          if (seedreg.size() >= 7) break;
          BoundaryPoint za = axis_data(evaluate(m, cand)).attracting;
          bool fresh = true;
          for (const FlagPoint& f : seedreg)
            if (circ_dist(f.at, za) < 0.2) fresh = false;
          if (fresh) seedreg.push_back(fixed_flag(m, r, cand, true));
        }
        std::vector<BoundaryPoint> seed;
        std::vector<FlagPoint> fullreg = seedreg;
        for (const FlagPoint& f : seedreg) {
          bool sep = true;
          for (const BoundaryPoint& q : seed)
            if (circ_dist(f.at, q) < 0.2) sep = false;
          if (sep) seed.push_back(f.at);
        }
        CrossRatioFn B = hitchin_fn(fullreg, i);
        admit_cross_ratio(B, seed);
        CyclicWord c = canonicalize_oriented(P, gw);
        CHECK(period_via_boxes(B, m, c, z) ==
              Approx(length_alpha(r, c, i)).epsilon(1e-9));
      }
    }
  }

  // Maximal family on the diagonal Sp(4) embedding: period 2 * ell * 2 / 2.
  LinearRep sp = sp_diagonal_rep(m, 2);
  for (const Word& gw : gws) {
    AxisData ax = axis_data(evaluate(m, gw));
    Word zw = choose_aux(m, gw, rng);
    BoundaryPoint z = axis_data(evaluate(m, zw)).attracting;
    Word gzw = concat(concat(gw, zw), inverse(gw));
    std::vector<LagrangianPoint> reg = {
        fixed_lagrangian(m, sp, gw, true), fixed_lagrangian(m, sp, gw, false),
        fixed_lagrangian(m, sp, zw, true), fixed_lagrangian(m, sp, gzw, true)};
    for (const Word& cand : pool) {
      if (reg.size() >= 7) break;
      BoundaryPoint za = axis_data(evaluate(m, cand)).attracting;
      bool fresh = true;
      for (const LagrangianPoint& f : reg)
        if (circ_dist(f.at, za) < 0.2) fresh = false;
      if (fresh) reg.push_back(fixed_lagrangian(m, sp, cand, true));
    }
    std::vector<BoundaryPoint> seed;
    for (const LagrangianPoint& f : reg) {
      bool sep = true;
      for (const BoundaryPoint& q : seed)
        if (circ_dist(f.at, q) < 0.2) sep = false;
      if (sep) seed.push_back(f.at);
    }
    CrossRatioFn B = maximal_fn(reg);
    admit_cross_ratio(B, seed);
    CyclicWord c = canonicalize_oriented(P, gw);
    CHECK(period_via_boxes(B, m, c, z) == Approx(2.0 * ax.length).epsilon(1e-9));
  }
}

TEST_CASE("period-minimizing proxy: finitely many classes under any threshold") {
  SurfaceModel m = build_model(2);
  GroupPresentation P(2);
  CrossRatioFn B = admitted_liouville();
  std::vector<CyclicWord> classes = enumerate_classes(P, 4);
  std::vector<double> periods;
  for (const CyclicWord& c : classes) {
    Isometry g = evaluate(m, c.letters);
    if (!g.hyperbolic()) continue;
    AxisData ax = axis_data(g);
    BoundaryPoint z = pt(ax.attracting.angle + 2.0);
    if (circ_dist(z, ax.attracting) < 1e-2 || circ_dist(z, ax.repelling) < 1e-2)
      z = pt(ax.attracting.angle + 2.7);
    periods.push_back(period_via_boxes(B, m, c, z));
  }
  std::sort(periods.begin(), periods.end());
  REQUIRE(periods.size() > 50);
  // Shortest period is the systole; counts below any T are finite prefixes.
  CHECK(periods.front() == Approx(2.0 * std::acosh(1.0 + std::sqrt(2.0))).epsilon(1e-9));
  for (double T : {4.0, 8.0, 12.0}) {
    auto below = std::lower_bound(periods.begin(), periods.end(), T);
    CHECK(below - periods.begin() < static_cast<std::ptrdiff_t>(periods.size()));
  }
}
