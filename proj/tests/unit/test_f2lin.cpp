#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "hsmoney/f2lin.hpp"
#include "hsmoney/rng.hpp"

namespace hsm {
namespace {

// Brute-force closure of a generator list under xor.
std::set<Word> closure(int n, const std::vector<Word>& gens) {
  std::set<Word> s{0};
  for (Word g : gens) {
    std::set<Word> next = s;
    for (Word x : s) next.insert(x ^ g);
    s = next;
  }
  (void)n;
  return s;
}

std::set<Word> brute_dual(int n, const std::set<Word>& a) {
  std::set<Word> out;
  for (Word y = 0; y < (Word{1} << n); ++y) {
    bool ok = true;
    for (Word x : a) ok = ok && parity(x & y) == 0;
    if (ok) out.insert(y);
  }
  return out;
}

std::set<Word> as_set(const Subspace& a) {
  const auto e = a.elements();
  return {e.begin(), e.end()};
}

TEST(F2Lin, CoordinateDual) {
  const Subspace a = Subspace::coordinate(6, 0, 3);
  EXPECT_EQ(dual(a), Subspace::coordinate(6, 3, 3));
  EXPECT_EQ(dual(Subspace::full(6)).dim(), 0);
  EXPECT_EQ(dual(Subspace(6)), Subspace::full(6));
}

TEST(F2Lin, DualMatchesEnumeration) {
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    const Subspace a = random_subspace(8, 4, rng);
    EXPECT_EQ(as_set(dual(a)), brute_dual(8, as_set(a)));
    EXPECT_EQ(dual(dual(a)), a);
  }
}

TEST(F2Lin, SpanIsCanonical) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<Word> g;
    for (int i = 0; i < 5; ++i) g.push_back(static_cast<Word>(rng.below(1u << 8)));
    const Subspace a = Subspace::span(8, g);
    EXPECT_EQ(as_set(a), closure(8, g));
    std::vector<Word> shuffled(g.rbegin(), g.rend());
    shuffled.push_back(g[0] ^ g[1]);
    EXPECT_EQ(Subspace::span(8, shuffled), a);
    for (Word x = 0; x < 256; ++x) EXPECT_EQ(a.contains_word(x), closure(8, g).count(x) == 1);
  }
}

TEST(F2Lin, IntersectionAndSum) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Subspace a = random_subspace(6, 3, rng), b = random_subspace(6, 3, rng);
    const auto sa = as_set(a), sb = as_set(b);
    int common = 0;
    for (Word x : sa) common += sb.count(x);
    EXPECT_EQ(1 << intersection_dim(a, b), common);
    EXPECT_EQ(sum(a, b).dim(), a.dim() + b.dim() - intersection_dim(a, b));
  }
}

TEST(F2Lin, RandomNeighbor) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Subspace a = random_subspace(8, 4, rng);
    const Subspace b = random_neighbor(a, rng);
    EXPECT_EQ(b.dim(), 4);
    EXPECT_EQ(intersection_dim(a, b), 3);
  }
}

TEST(F2Lin, RandomSubspaceIsRoughlyUniform) {
  // F2^3 has 7 two-dimensional subspaces.
  Rng rng(9);
  std::map<std::vector<Word>, int> counts;
  const int draws = 7000;
  for (int t = 0; t < draws; ++t) ++counts[random_subspace(3, 2, rng).basis()];
  ASSERT_EQ(counts.size(), 7u);
  for (const auto& [k, c] : counts) EXPECT_NEAR(c, draws / 7.0, 5 * std::sqrt(draws / 7.0));
}

TEST(F2Lin, LinMapInverseAndTranspose) {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    const LinMap f = LinMap::random_invertible(10, rng);
    EXPECT_TRUE(f.invertible());
    const LinMap fi = f.inverse();
    for (Word x = 0; x < 1024; x += 37) EXPECT_EQ(fi.apply_word(f.apply_word(x)), x);
    EXPECT_EQ(f.compose(fi), LinMap::identity(10));
    EXPECT_EQ(f.inverse_transpose().transpose(), fi);
    // <f x, y> = <x, f^T y>
    for (int i = 0; i < 20; ++i) {
      const Word x = static_cast<Word>(rng.below(1024)), y = static_cast<Word>(rng.below(1024));
      EXPECT_EQ(parity(f.apply_word(x) & y), parity(x & f.transpose().apply_word(y)));
    }
  }
}

TEST(F2Lin, SingularInverseThrows) {
  const LinMap z(3, {1, 1, 0});
  EXPECT_FALSE(z.invertible());
  EXPECT_THROW(z.inverse(), std::domain_error);
}

TEST(F2Lin, ImageDualIdentity) {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const Subspace a = random_subspace(8, 4, rng);
    const LinMap f = LinMap::random_invertible(8, rng);
    EXPECT_EQ(dual(image(f, a)), image(f.inverse_transpose(), dual(a)));
  }
}

TEST(F2Lin, TextRoundTrip) {
  Rng rng(19);
  const Subspace a = random_subspace(10, 5, rng);
  EXPECT_EQ(Subspace::from_text(a.to_text()), a);
  const BitVec v = BitVec::from_string("0110");
  EXPECT_EQ(v.to_string(), "0110");
  EXPECT_EQ(v.dot(BitVec::from_string("0100")), 1);
}

TEST(F2Lin, AmbientCap) { EXPECT_THROW(Subspace(kMaxAmbientDim + 1), std::invalid_argument); }

}  // namespace
}  // namespace hsm
