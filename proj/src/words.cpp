#include "surf/words.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace surf {

bool word_less(const Word& u, const Word& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    int a = letter_rank(u[i]), b = letter_rank(v[i]);
    if (a != b) return a < b;
  }
  return false;
}

Word inverse(const Word& w) {
  Word r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = inv(w[w.size() - 1 - i]);
  return r;
}

Word free_reduce(Word w) {
  Word out;
  out.reserve(w.size());
  for (Letter l : w) {
    if (!out.empty() && out.back() == inv(l))
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Word cyclic_reduce(Word w) {
  w = free_reduce(std::move(w));
  std::size_t a = 0, b = w.size();
  while (b > a + 1 && w[a] == inv(w[b - 1])) {
    ++a;
    --b;
  }
  return Word(w.begin() + static_cast<long>(a), w.begin() + static_cast<long>(b));
}

Word concat(const Word& u, const Word& v) {
  Word w = u;
  w.insert(w.end(), v.begin(), v.end());
  return free_reduce(std::move(w));
}

std::string word_str(const Word& w) {
  std::string s;
  for (Letter l : w) {
    int a = l > 0 ? l : -l;
    char base = (a % 2 == 1) ? 'a' : 'b';
    int idx = (a + 1) / 2;
    char c = (l > 0) ? base : static_cast<char>(base - 'a' + 'A');
    s += c;
    s += std::to_string(idx);
  }
  return s.empty() ? "1" : s;
}

Word parse_word(const std::string& s, int genus) {
  Word w;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ') {
      ++i;
      continue;
    }
    char c = s[i];
    bool upper = (c >= 'A' && c <= 'Z');
    char low = upper ? static_cast<char>(c - 'A' + 'a') : c;
    if (low != 'a' && low != 'b') throw parse_error("bad letter '" + std::string(1, c) + "'");
    ++i;
    std::size_t j = i;
    while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) throw parse_error("missing generator index in word");
    int idx = std::stoi(s.substr(i, j - i));
    if (idx < 1 || idx > genus) throw parse_error("generator index out of range");
    int g = (low == 'a') ? 2 * idx - 1 : 2 * idx;
    w.push_back(static_cast<Letter>(upper ? -g : g));
    i = j;
  }
  return w;
}

GroupPresentation::GroupPresentation(int g) : genus(g) {
  if (g < 2) throw construction_error("genus must be >= 2");
  for (int i = 1; i <= g; ++i) {
    Letter a = static_cast<Letter>(2 * i - 1), b = static_cast<Letter>(2 * i);
    relator_.push_back(a);
    relator_.push_back(b);
    relator_.push_back(inv(a));
    relator_.push_back(inv(b));
  }
  auto add_rotations = [&](const Word& r) {
    for (std::size_t k = 0; k < r.size(); ++k) forms_.push_back(rotate(r, k));
  };
  add_rotations(relator_);
  add_rotations(inverse(relator_));
}

Word rotate(const Word& w, std::size_t k) {
  if (w.empty()) return w;
  k %= w.size();
  Word r(w.begin() + static_cast<long>(k), w.end());
  r.insert(r.end(), w.begin(), w.begin() + static_cast<long>(k));
  return r;
}

namespace {

// Lexicographically minimal rotation under letter_rank order.
Word rot_min(const Word& w) {
  if (w.empty()) return w;
  Word best = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    Word r = rotate(w, k);
    if (word_less(r, best)) best = r;
  }
  return best;
}

// Longest match of the cyclic word w starting at position i against form F.
std::size_t cyclic_match(const Word& w, std::size_t i, const Word& F) {
  std::size_t n = w.size(), L = 0;
  std::size_t cap = std::min(n, F.size());
  while (L < cap && w[(i + L) % n] == F[L]) ++L;
  return L;
}

// One Dehn shrink step on a cyclic word: find a subword strictly longer than
// half a relator form and replace it with the inverse of the complement.
// Returns true if a replacement happened.
bool dehn_step_cyclic(const GroupPresentation& P, Word& w) {
  const std::size_t half = 2 * static_cast<std::size_t>(P.genus);
  std::size_t n = w.size();
  if (n == 0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Word& F : P.relator_forms()) {
      std::size_t L = cyclic_match(w, i, F);
      if (L > half) {
        Word rest;
        rest.reserve(n - L);
        for (std::size_t t = 0; t < n - L; ++t) rest.push_back(w[(i + L + t) % n]);
        Word suf(F.begin() + static_cast<long>(L), F.end());
        Word repl = inverse(suf);
        repl.insert(repl.end(), rest.begin(), rest.end());
        w = cyclic_reduce(std::move(repl));
        return true;
      }
    }
  }
  return false;
}

Word dehn_cyclic_min(const GroupPresentation& P, Word w) {
  w = cyclic_reduce(std::move(w));
  while (dehn_step_cyclic(P, w)) {
  }
  return w;
}

// All equal-length neighbors of a Dehn-minimal cyclic word obtained by
// swapping a half-relator subword for the complementary half.
void half_swap_neighbors(const GroupPresentation& P, const Word& w, std::vector<Word>& out) {
  const std::size_t half = 2 * static_cast<std::size_t>(P.genus);
  std::size_t n = w.size();
  if (n < half) return;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Word& F : P.relator_forms()) {
      std::size_t L = cyclic_match(w, i, F);
      if (L >= half) {
        Word rest;
        rest.reserve(n - half);
        for (std::size_t t = 0; t < n - half; ++t) rest.push_back(w[(i + half + t) % n]);
        Word suf(F.begin() + static_cast<long>(half), F.end());
        Word repl = inverse(suf);
        repl.insert(repl.end(), rest.begin(), rest.end());
        out.push_back(cyclic_reduce(std::move(repl)));
      }
    }
  }
}

constexpr std::size_t kClosureCap = 1 << 20;

// Closure of the seed set under half-relator swaps (conjugacy-preserving,
// length-preserving moves), with restart if a move shortens the word.
// Returns the lexicographically minimal rotation representative found.
Word closure_min(const GroupPresentation& P, std::vector<Word> seeds) {
restart:
  std::set<Word> seen;
  std::vector<Word> stack;
  for (Word& s : seeds) {
    Word m = rot_min(s);
    if (seen.insert(m).second) stack.push_back(m);
  }
  Word best = *seen.begin();
  std::vector<Word> nbrs;
  while (!stack.empty()) {
    Word cur = stack.back();
    stack.pop_back();
    nbrs.clear();
    half_swap_neighbors(P, cur, nbrs);
    for (Word& nb : nbrs) {
      if (nb.size() < cur.size()) {
        // The swap exposed a shrink; restart from the shorter word.
        seeds.assign(1, dehn_cyclic_min(P, nb));
        goto restart;
      }
      Word m = rot_min(nb);
      if (seen.insert(m).second) {
        if (seen.size() > kClosureCap) throw resource_error("conjugacy closure exceeded cap");
        if (word_less(m, best)) best = m;
        stack.push_back(m);
      }
    }
    if (word_less(cur, best)) best = cur;
  }
  return best;
}

CyclicWord canonicalize_impl(const GroupPresentation& P, const Word& w, bool identify_inverse) {
  Word r = dehn_cyclic_min(P, w);
  if (r.empty()) throw identity_word_error("word represents the identity");
  std::vector<Word> seeds{r};
  if (identify_inverse) seeds.push_back(dehn_cyclic_min(P, inverse(r)));
  CyclicWord c;
  c.letters = closure_min(P, std::move(seeds));
  c.canonical = true;
  if (c.letters.empty()) throw identity_word_error("word represents the identity");
  return c;
}

}  // namespace

CyclicWord canonicalize(const GroupPresentation& P, const Word& w) {
  return canonicalize_impl(P, w, true);
}

CyclicWord canonicalize_oriented(const GroupPresentation& P, const Word& w) {
  return canonicalize_impl(P, w, false);
}

namespace {

// Linear (non-cyclic) Dehn shrink for element normal forms.
bool dehn_step_linear(const GroupPresentation& P, Word& w) {
  const std::size_t half = 2 * static_cast<std::size_t>(P.genus);
  std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (const Word& F : P.relator_forms()) {
      std::size_t L = 0;
      std::size_t cap = std::min(n - i, F.size());
      while (L < cap && w[i + L] == F[L]) ++L;
      if (L > half) {
        Word suf(F.begin() + static_cast<long>(L), F.end());
        Word repl(w.begin(), w.begin() + static_cast<long>(i));
        Word mid = inverse(suf);
        repl.insert(repl.end(), mid.begin(), mid.end());
        repl.insert(repl.end(), w.begin() + static_cast<long>(i + L), w.end());
        w = free_reduce(std::move(repl));
        return true;
      }
    }
  }
  return false;
}

void half_swap_neighbors_linear(const GroupPresentation& P, const Word& w,
                                std::vector<Word>& out) {
  const std::size_t half = 2 * static_cast<std::size_t>(P.genus);
  std::size_t n = w.size();
  for (std::size_t i = 0; i + half <= n; ++i) {
    for (const Word& F : P.relator_forms()) {
      std::size_t L = 0;
      while (L < half && w[i + L] == F[L]) ++L;
      if (L >= half) {
        Word suf(F.begin() + static_cast<long>(half), F.end());
        Word repl(w.begin(), w.begin() + static_cast<long>(i));
        Word mid = inverse(suf);
        repl.insert(repl.end(), mid.begin(), mid.end());
        repl.insert(repl.end(), w.begin() + static_cast<long>(i + half), w.end());
        out.push_back(free_reduce(std::move(repl)));
      }
    }
  }
}

}  // namespace

Word element_normal_form(const GroupPresentation& P, const Word& w) {
  Word r = free_reduce(w);
  while (dehn_step_linear(P, r)) {
  }
restart:
  std::set<Word> seen{r};
  std::vector<Word> stack{r};
  Word best = r;
  std::vector<Word> nbrs;
  while (!stack.empty()) {
    Word cur = stack.back();
    stack.pop_back();
    nbrs.clear();
    half_swap_neighbors_linear(P, cur, nbrs);
    for (Word& nb : nbrs) {
      if (nb.size() < cur.size()) {
        while (dehn_step_linear(P, nb)) {
        }
        r = nb;
        goto restart;
      }
      if (seen.insert(nb).second) {
        if (seen.size() > kClosureCap) throw resource_error("element closure exceeded cap");
        if (word_less(nb, best)) best = nb;
        stack.push_back(nb);
      }
    }
  }
  return best;
}

bool elements_equal(const GroupPresentation& P, const Word& u, const Word& v) {
  return element_normal_form(P, concat(u, inverse(v))).empty();
}

namespace {

std::string cache_path(const std::string& dir, int genus, int max_len) {
  return dir + "/classes_g" + std::to_string(genus) + "_L" + std::to_string(max_len) + ".txt";
}

bool load_cache(const std::string& path, int genus, int max_len, std::vector<CyclicWord>& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::string header;
  if (!std::getline(in, header)) return false;
  std::string expect = "genus=" + std::to_string(genus) + " max_len=" + std::to_string(max_len);
  if (header != expect) return false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    CyclicWord c;
    int x;
    while (ls >> x) c.letters.push_back(static_cast<Letter>(x));
    c.canonical = true;
    out.push_back(std::move(c));
  }
  return true;
}

void store_cache(const std::string& dir, const std::string& path, int genus, int max_len,
                 const std::vector<CyclicWord>& classes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << "genus=" << genus << " max_len=" << max_len << "\n";
    for (const CyclicWord& c : classes) {
      for (std::size_t i = 0; i < c.letters.size(); ++i)
        out << (i ? " " : "") << static_cast<int>(c.letters[i]);
      out << "\n";
    }
  }
  std::filesystem::rename(tmp, path, ec);  // atomic publish for concurrent readers
}

}  // namespace

std::vector<CyclicWord> enumerate_classes(const GroupPresentation& P, int max_len,
                                          const EnumerateOptions& opt) {
  if (max_len < 1) throw resource_error("max_len must be >= 1");
  std::string path;
  if (!opt.cache_dir.empty()) {
    path = cache_path(opt.cache_dir, P.genus, max_len);
    std::vector<CyclicWord> cached;
    if (load_cache(path, P.genus, max_len, cached)) return cached;
  }

  std::set<Word> classes;
  const int A = P.alphabet();
  Word w;
  // Depth-first over freely reduced words; a cyclic word is processed only
  // through its minimal rotation, and only when not beaten by its inverse.
  auto consider = [&](const Word& word) {
    if (word[0] == inv(word.back())) return;  // not cyclically reduced
    Word m = rot_min(word);
    if (m != word) return;
    Word wi = rot_min(inverse(word));
    if (word_less(wi, m)) return;
    CyclicWord c;
    try {
      c = canonicalize(P, word);
    } catch (const Error& e) {
      if (e.kind() == "identity-word") return;  // relator rotations etc.
      throw;
    }
    classes.insert(c.letters);
    if (classes.size() > opt.class_budget) throw resource_error("class-count budget exceeded");
  };
  std::vector<std::size_t> iter;
  // Iterative DFS over letters -A..A skipping 0 and immediate inverses.
  std::vector<Letter> alpha;
  for (int g = 1; g <= A; ++g) {
    alpha.push_back(static_cast<Letter>(g));
    alpha.push_back(static_cast<Letter>(-g));
  }
  std::sort(alpha.begin(), alpha.end(),
            [](Letter x, Letter y) { return letter_rank(x) < letter_rank(y); });
  struct Frame {
    std::size_t next = 0;
  };
  std::vector<Frame> fr(1);
  w.clear();
  while (!fr.empty()) {
    Frame& f = fr.back();
    if (f.next >= alpha.size()) {
      fr.pop_back();
      if (!w.empty()) w.pop_back();
      continue;
    }
    Letter l = alpha[f.next++];
    if (!w.empty() && l == inv(w.back())) continue;
    w.push_back(l);
    consider(w);
    if (static_cast<int>(w.size()) < max_len)
      fr.emplace_back();
    else
      w.pop_back();
  }

  std::vector<CyclicWord> out;
  out.reserve(classes.size());
  for (const Word& cw : classes) out.push_back(CyclicWord{cw, true});
  std::sort(out.begin(), out.end());
  if (!path.empty()) store_cache(opt.cache_dir, path, P.genus, max_len, out);
  return out;
}

PrimitiveRoot primitive_root(const GroupPresentation& P, const CyclicWord& c) {
  const Word& w = c.letters;
  std::size_t n = w.size();
  for (std::size_t p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    if (rotate(w, p) == w) {
      Word root(w.begin(), w.begin() + static_cast<long>(p));
      return PrimitiveRoot{canonicalize(P, root), static_cast<int>(n / p)};
    }
  }
  return PrimitiveRoot{c, 1};
}

}  // namespace surf
