#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "surf/errors.hpp"

namespace surf {

// Letters of the genus-g surface group: +k is generator k (1..2g),
// -k its inverse.  Generator 2i-1 is a_i, generator 2i is b_i.
using Letter = std::int8_t;
using Word = std::vector<Letter>;

inline Letter inv(Letter l) { return static_cast<Letter>(-l); }

// Total order on letters used for all lexicographic word comparisons:
// a1 < a1^-1 < b1 < b1^-1 < a2 < ...
inline int letter_rank(Letter l) {
  int a = l > 0 ? l : -l;
  return 2 * (a - 1) + (l < 0 ? 1 : 0);
}

bool word_less(const Word& u, const Word& v);  // by length, then letter rank

Word inverse(const Word& w);
Word free_reduce(Word w);
Word cyclic_reduce(Word w);               // free-reduce, then trim matching ends
Word concat(const Word& u, const Word& v);  // freely reduced concatenation
std::string word_str(const Word& w);        // a1 b1^-1 ... rendered as "a1 B1" style
Word parse_word(const std::string& s, int genus);

struct GroupPresentation {
  int genus;
  explicit GroupPresentation(int g);

  int alphabet() const { return 2 * genus; }
  const Word& relator() const { return relator_; }
  // All cyclic rotations of the relator and of its inverse (8g words of length 4g).
  const std::vector<Word>& relator_forms() const { return forms_; }

 private:
  Word relator_;
  std::vector<Word> forms_;
};

// A conjugacy class representative: cyclically reduced, Dehn-reduced,
// rotation/inversion-lexicographically minimal.
struct CyclicWord {
  Word letters;
  bool canonical = false;

  bool operator==(const CyclicWord& o) const { return letters == o.letters; }
  bool operator!=(const CyclicWord& o) const { return !(*this == o); }
  bool operator<(const CyclicWord& o) const { return word_less(letters, o.letters); }
  std::size_t size() const { return letters.size(); }
};

// Dehn's algorithm canonical form of the conjugacy class of w, with
// [[w]] ~ [[w^-1]] identification.  Throws identity-word error when w
// represents the identity.
CyclicWord canonicalize(const GroupPresentation& P, const Word& w);

// Orientation-sensitive variant: identifies conjugates only (not inverses).
CyclicWord canonicalize_oriented(const GroupPresentation& P, const Word& w);

// Shortest (Dehn-reduced) lexicographically minimal representative of the
// group ELEMENT of w (no conjugacy quotient).  Used for exact element
// identity tests.
Word element_normal_form(const GroupPresentation& P, const Word& w);

// Whether two words are equal as group elements.
bool elements_equal(const GroupPresentation& P, const Word& u, const Word& v);

struct EnumerateOptions {
  std::size_t class_budget = 50'000'000;
  std::string cache_dir;  // empty: no caching
};

// All conjugacy classes (mod inversion) with a representative of word
// length <= max_len, sorted by (length, lex).  Deterministic.
std::vector<CyclicWord> enumerate_classes(const GroupPresentation& P, int max_len,
                                          const EnumerateOptions& opt = {});

struct PrimitiveRoot {
  CyclicWord root;
  int power = 1;
};
PrimitiveRoot primitive_root(const GroupPresentation& P, const CyclicWord& c);

// Rotation of a cyclic word by k (prefix of length k moved to the back);
// as a group element this is conjugation by the length-k prefix inverse.
Word rotate(const Word& w, std::size_t k);

}  // namespace surf
