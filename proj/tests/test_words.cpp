#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "surf/words.hpp"

using namespace surf;

namespace {

Word W(const std::string& s, int genus = 2) { return parse_word(s, genus); }

Word random_reduced_word(std::mt19937& rng, int genus, int len) {
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

// Independent small-length oracle: below half the relator length no relator
// subword can appear, so conjugacy classes coincide with free-group classes:
// cyclically reduced words up to rotation and inversion.
std::set<Word> free_classes_upto(int genus, int max_len) {
  std::set<Word> out;
  std::vector<Word> stack{{}};
  while (!stack.empty()) {
    Word w = stack.back();
    stack.pop_back();
    if (!w.empty() && w[0] != inv(w.back())) {
      Word best = w;
      for (std::size_t k = 0; k < w.size(); ++k) {
        Word r = rotate(w, k);
        if (word_less(r, best)) best = r;
        Word ri = inverse(r);
        for (std::size_t m = 0; m < ri.size(); ++m) {
          Word rr = rotate(ri, m);
          if (word_less(rr, best)) best = rr;
        }
      }
      out.insert(best);
    }
    if (static_cast<int>(w.size()) == max_len) continue;
    for (int g = 1; g <= 2 * genus; ++g)
      for (int s : {1, -1}) {
        Letter l = static_cast<Letter>(g * s);
        if (!w.empty() && l == inv(w.back())) continue;
        Word nx = w;
        nx.push_back(l);
        stack.push_back(nx);
      }
  }
  return out;
}

}  // namespace

TEST_CASE("letters, parsing and printing") {
  CHECK(letter_rank(1) == 0);
  CHECK(letter_rank(-1) == 1);
  CHECK(letter_rank(2) == 2);
  CHECK(letter_rank(-4) == 7);
  Word w = W("a1B1a2b2A1");
  CHECK(w == Word{1, -2, 3, 4, -1});
  CHECK(word_str(w) == "a1B1a2b2A1");
  CHECK(parse_word(word_str(w), 2) == w);
  CHECK_THROWS_AS(parse_word("a3", 2), Error);
  CHECK_THROWS_AS(parse_word("c1", 2), Error);
  CHECK_THROWS_AS(parse_word("ab", 2), Error);
}

TEST_CASE("free and cyclic reduction") {
  CHECK(free_reduce(W("a1A1")).empty());
  CHECK(free_reduce(W("a1b1B1A1a2")) == W("a2"));
  CHECK(cyclic_reduce(W("a1b1A1")) == W("b1"));
  CHECK(cyclic_reduce(W("b1a2a1A2B1")) == W("a1"));
  CHECK(concat(W("a1b1"), W("B1a2")) == W("a1a2"));
  CHECK(inverse(W("a1B1a2")) == W("A2b1A1"));
}

TEST_CASE("presentation relator and forms") {
  GroupPresentation P(2);
  CHECK(P.relator() == W("a1b1A1B1a2b2A2B2"));
  CHECK(P.relator_forms().size() == 16);
  for (const Word& f : P.relator_forms()) CHECK(f.size() == 8);
  GroupPresentation P3(3);
  CHECK(P3.relator().size() == 12);
  CHECK(P3.relator_forms().size() == 24);
  CHECK_THROWS_AS(GroupPresentation(1), Error);
}

TEST_CASE("identity words are rejected") {
  GroupPresentation P(2);
  CHECK_THROWS_AS(canonicalize(P, Word{}), Error);
  CHECK_THROWS_AS(canonicalize(P, W("a1A1")), Error);
  CHECK_THROWS_AS(canonicalize(P, P.relator()), Error);
  Word conj = concat(W("b2a1"), concat(inverse(P.relator()), W("A1B2")));
  CHECK_THROWS_AS(canonicalize(P, conj), Error);
}

TEST_CASE("half-relator swap identifies complementary halves") {
  GroupPresentation P(2);
  // a1b1A1B1 and the inverse of the complementary half b2a2B2A2 are conjugate.
  CHECK(canonicalize(P, W("a1b1A1B1")) == canonicalize(P, W("b2a2B2A2")));
  CHECK(canonicalize_oriented(P, W("a1b1A1B1")).letters ==
        canonicalize_oriented(P, W("b2a2B2A2")).letters);
}

TEST_CASE("Dehn shrink of long relator subwords") {
  GroupPresentation P(2);
  // Five letters of the relator followed by junk must shrink to length <= 4 + junk.
  Word w = concat(W("a1b1A1B1a2"), W("b1b1"));
  CyclicWord c = canonicalize(P, w);
  CHECK(c.size() <= 5);
  // Multiplying by a conjugated relator never changes the class.
  Word r = concat(W("a2B1"), concat(P.relator(), W("b1A2")));
  CHECK(canonicalize(P, concat(w, r)) == c);
}

TEST_CASE("canonical form is conjugation and inversion invariant") {
  GroupPresentation P(2);
  std::mt19937 rng(20240817);
  for (int t = 0; t < 200; ++t) {
    Word w = random_reduced_word(rng, 2, 1 + t % 9);
    CyclicWord c;
    try {
      c = canonicalize(P, w);
    } catch (const Error&) {
      continue;  // random word happened to be trivial
    }
    Word h = random_reduced_word(rng, 2, 1 + t % 5);
    Word conj = concat(h, concat(w, inverse(h)));
    CHECK(canonicalize(P, conj) == c);
    CHECK(canonicalize(P, inverse(w)) == c);
    CHECK(canonicalize(P, rotate(w, t % w.size())).letters == c.letters);
  }
}

TEST_CASE("oriented canonical form separates some inverse pairs") {
  GroupPresentation P(2);
  Word w = W("a1a1b1");
  CHECK(canonicalize_oriented(P, w) != canonicalize_oriented(P, inverse(w)));
  CHECK(canonicalize(P, w) == canonicalize(P, inverse(w)));
  std::mt19937 rng(7);
  for (int t = 0; t < 100; ++t) {
    Word u = random_reduced_word(rng, 2, 2 + t % 7);
    CyclicWord a;
    try {
      a = canonicalize_oriented(P, u);
    } catch (const Error&) {
      continue;
    }
    Word h = random_reduced_word(rng, 2, 1 + t % 4);
    CHECK(canonicalize_oriented(P, concat(h, concat(u, inverse(h)))) == a);
  }
}

TEST_CASE("element normal forms and equality") {
  GroupPresentation P(2);
  CHECK(element_normal_form(P, P.relator()).empty());
  CHECK(element_normal_form(P, W("a1A1")).empty());
  CHECK(elements_equal(P, W("a1b1"), concat(W("a1b1"), P.relator())));
  CHECK_FALSE(elements_equal(P, W("a1b1"), W("b1a1")));
  CHECK_FALSE(elements_equal(P, W("a1"), W("A1")));
  // Normal form length is a conjugation-free invariant: multiplying by the
  // relator on either side never changes it.
  std::mt19937 rng(99);
  for (int t = 0; t < 60; ++t) {
    Word w = random_reduced_word(rng, 2, 1 + t % 8);
    Word n = element_normal_form(P, w);
    CHECK(element_normal_form(P, concat(P.relator(), w)) == n);
    CHECK(element_normal_form(P, concat(w, inverse(P.relator()))) == n);
  }
}

TEST_CASE("class enumeration matches the free-group oracle at short lengths") {
  GroupPresentation P(2);
  for (int L = 1; L <= 3; ++L) {
    auto classes = enumerate_classes(P, L);
    auto oracle = free_classes_upto(2, L);
    CHECK(classes.size() == oracle.size());
    for (const CyclicWord& c : classes) CHECK(oracle.count(c.letters) == 1);
  }
  auto one = enumerate_classes(P, 1);
  CHECK(one.size() == 4);  // a1, b1, a2, b2 with inverses identified
  // Sorted by (length, lex) and strictly increasing.
  auto cl = enumerate_classes(P, 4);
  CHECK(std::is_sorted(cl.begin(), cl.end()));
  CHECK(std::adjacent_find(cl.begin(), cl.end()) == cl.end());
}

TEST_CASE("enumeration is genus-generic") {
  GroupPresentation P3(3);
  auto classes = enumerate_classes(P3, 2);
  auto oracle = free_classes_upto(3, 2);
  CHECK(classes.size() == oracle.size());
}

TEST_CASE("enumeration cache round-trips") {
  GroupPresentation P(2);
  EnumerateOptions opt;
  opt.cache_dir = "cache_test_tmp";
  auto a = enumerate_classes(P, 3, opt);
  auto b = enumerate_classes(P, 3, opt);  // served from disk
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("class budget is enforced") {
  GroupPresentation P(2);
  EnumerateOptions opt;
  opt.class_budget = 3;
  CHECK_THROWS_AS(enumerate_classes(P, 2, opt), Error);
}

TEST_CASE("primitive roots") {
  GroupPresentation P(2);
  Word w = W("a1b1");
  Word w3 = concat(w, concat(w, w));
  PrimitiveRoot pr = primitive_root(P, canonicalize(P, w3));
  CHECK(pr.power == 3);
  CHECK(pr.root == canonicalize(P, w));
  PrimitiveRoot p1 = primitive_root(P, canonicalize(P, W("a1a1b1")));
  CHECK(p1.power == 1);
}
