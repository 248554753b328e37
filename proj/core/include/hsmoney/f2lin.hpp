#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsmoney/rng.hpp"

namespace hsm {

/// Bit-packed vector over F2. Bit i of a word holds coordinate x_{i+1}.
using Word = std::uint32_t;

inline constexpr int kMaxAmbientDim = 24;

inline int parity(Word x) { return __builtin_parity(x); }
inline int popcount(Word x) { return __builtin_popcount(x); }
inline int highest_bit(Word x) { return 31 - __builtin_clz(x); }

void check_ambient_dim(int n);

class BitVec {
 public:
  BitVec() = default;
  BitVec(int n, Word bits);

  static BitVec zero(int n) { return BitVec(n, 0); }
  /// Unit vector with a single 1 at 0-based coordinate i.
  static BitVec unit(int n, int i);
  /// Parses a 0/1 string; character j is coordinate j (0-based).
  static BitVec from_string(std::string_view text);

  int size() const { return n_; }
  Word bits() const { return bits_; }
  bool get(int i) const { return (bits_ >> i) & 1u; }

  int dot(const BitVec& other) const;
  BitVec operator^(const BitVec& other) const;
  std::string to_string() const;

  bool operator==(const BitVec&) const = default;

 private:
  int n_ = 0;
  Word bits_ = 0;
};

/// Linear subspace of F2^n held in reduced row echelon form.
///
/// Rows are sorted by pivot (highest set bit) in decreasing order and every pivot
/// column is zero in all other rows, so equal subspaces have identical rows.
class Subspace {
 public:
  explicit Subspace(int n = 0);

  static Subspace span(int n, std::span<const Word> generators);
  static Subspace span(std::span<const BitVec> generators);
  static Subspace full(int n);
  /// span{e_first, ..., e_{first+count-1}} with 0-based coordinates.
  static Subspace coordinate(int n, int first, int count);

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(rows_.size()); }
  const std::vector<Word>& basis() const { return rows_; }
  std::vector<BitVec> basis_vectors() const;

  bool contains(const BitVec& x) const;
  /// Membership without dimension checks, for inner loops.
  bool contains_word(Word x) const {
    for (Word r : rows_) {
      if ((x >> highest_bit(r)) & 1u) x ^= r;
    }
    return x == 0;
  }

  /// Adds a vector to the span; returns false when it was already present.
  bool insert(Word v);

  /// All 2^dim elements, in Gray-code order starting at 0.
  std::vector<Word> elements() const;

  std::string to_text() const;
  static Subspace from_text(std::string_view text);

  bool operator==(const Subspace&) const = default;

 private:
  int n_;
  std::vector<Word> rows_;
};

Subspace dual(const Subspace& a);
Subspace sum(const Subspace& a, const Subspace& b);
/// dim(A ∩ B) = dim A + dim B − dim(A + B).
int intersection_dim(const Subspace& a, const Subspace& b);
/// Rank of the span of a list of words.
int rank_of(std::span<const Word> vectors);

/// Uniform dim-dimensional subspace of F2^n (rejection on full-rank generator matrices).
Subspace random_subspace(int n, int dim, Rng& rng);

/// Uniform B with dim B = dim A and dim(A ∩ B) = dim A − 1.
///
/// B = C + span{v} with C a uniform hyperplane of A and v a uniform vector outside A.
Subspace random_neighbor(const Subspace& a, Rng& rng);

/// Linear map on F2^n; output bit i is the parity of rows[i] & x.
class LinMap {
 public:
  LinMap() = default;
  LinMap(int n, std::vector<Word> rows);

  static LinMap identity(int n);
  /// Map whose j-th column (image of e_j) is columns[j].
  static LinMap from_columns(int n, std::span<const Word> columns);
  static LinMap random_invertible(int n, Rng& rng);

  int ambient_dim() const { return n_; }
  const std::vector<Word>& rows() const { return rows_; }
  const std::vector<Word>& columns() const { return cols_; }

  BitVec apply(const BitVec& x) const;
  Word apply_word(Word x) const {
    Word y = 0;
    while (x != 0) {
      y ^= cols_[__builtin_ctz(x)];
      x &= x - 1;
    }
    return y;
  }

  int rank() const;
  bool invertible() const { return rank() == n_; }
  /// Throws std::domain_error when singular.
  LinMap inverse() const;
  LinMap transpose() const;
  LinMap inverse_transpose() const;
  /// (this ∘ other)(x) = this(other(x)).
  LinMap compose(const LinMap& other) const;

  bool operator==(const LinMap& other) const { return n_ == other.n_ && rows_ == other.rows_; }

 private:
  int n_ = 0;
  std::vector<Word> rows_;
  std::vector<Word> cols_;
};

/// {f(x) : x ∈ A}.
Subspace image(const LinMap& f, const Subspace& a);

}  // namespace hsm
