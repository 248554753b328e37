#include "hsmoney/f2lin.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hsm {

namespace {

Word low_mask(int n) { return n >= 32 ? ~Word{0} : ((Word{1} << n) - 1); }

void check_same(int a, int b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

void check_ambient_dim(int n) {
  if (n < 0 || n > kMaxAmbientDim) {
    throw std::invalid_argument("ambient dimension " + std::to_string(n) +
                                " outside [0, " + std::to_string(kMaxAmbientDim) + "]");
  }
}

BitVec::BitVec(int n, Word bits) : n_(n), bits_(bits) {
  check_ambient_dim(n);
  if ((bits & ~low_mask(n)) != 0) {
    throw std::invalid_argument("BitVec: bits set beyond length");
  }
}

BitVec BitVec::unit(int n, int i) {
  if (i < 0 || i >= n) throw std::out_of_range("BitVec::unit: coordinate out of range");
  return BitVec(n, Word{1} << i);
}

BitVec BitVec::from_string(std::string_view text) {
  Word bits = 0;
  for (std::size_t j = 0; j < text.size(); ++j) {
    if (text[j] == '1') {
      bits |= Word{1} << j;
    } else if (text[j] != '0') {
      throw std::invalid_argument("BitVec::from_string: expected only 0/1 characters");
    }
  }
  return BitVec(static_cast<int>(text.size()), bits);
}

int BitVec::dot(const BitVec& other) const {
  check_same(n_, other.n_, "BitVec::dot");
  return parity(bits_ & other.bits_);
}

BitVec BitVec::operator^(const BitVec& other) const {
  check_same(n_, other.n_, "BitVec::operator^");
  return BitVec(n_, bits_ ^ other.bits_);
}

std::string BitVec::to_string() const {
  std::string s(n_, '0');
  for (int j = 0; j < n_; ++j) {
    if (get(j)) s[j] = '1';
  }
  return s;
}

Subspace::Subspace(int n) : n_(n) { check_ambient_dim(n); }

bool Subspace::insert(Word v) {
  for (Word r : rows_) {
    if ((v >> highest_bit(r)) & 1u) v ^= r;
  }
  if (v == 0) return false;
  int p = highest_bit(v);
  for (Word& r : rows_) {
    if ((r >> p) & 1u) r ^= v;
  }
  auto pos = std::find_if(rows_.begin(), rows_.end(),
                          [p](Word r) { return highest_bit(r) < p; });
  rows_.insert(pos, v);
  return true;
}

Subspace Subspace::span(int n, std::span<const Word> generators) {
  Subspace s(n);
  for (Word g : generators) {
    if ((g & ~low_mask(n)) != 0) {
      throw std::invalid_argument("Subspace::span: generator longer than ambient dimension");
    }
    s.insert(g);
  }
  return s;
}

Subspace Subspace::span(std::span<const BitVec> generators) {
  if (generators.empty()) {
    throw std::invalid_argument("Subspace::span: empty generator list has no length");
  }
  Subspace s(generators.front().size());
  for (const BitVec& g : generators) {
    check_same(g.size(), s.n_, "Subspace::span");
    s.insert(g.bits());
  }
  return s;
}

Subspace Subspace::full(int n) { return coordinate(n, 0, n); }

Subspace Subspace::coordinate(int n, int first, int count) {
  if (first < 0 || count < 0 || first + count > n) {
    throw std::out_of_range("Subspace::coordinate: range outside ambient dimension");
  }
  Subspace s(n);
  for (int i = first; i < first + count; ++i) s.insert(Word{1} << i);
  return s;
}

std::vector<BitVec> Subspace::basis_vectors() const {
  std::vector<BitVec> out;
  out.reserve(rows_.size());
  for (Word r : rows_) out.emplace_back(n_, r);
  return out;
}

bool Subspace::contains(const BitVec& x) const {
  check_same(x.size(), n_, "Subspace::contains");
  return contains_word(x.bits());
}

std::vector<Word> Subspace::elements() const {
  std::vector<Word> out(std::size_t{1} << rows_.size());
  Word cur = 0;
  out[0] = 0;
  for (std::size_t g = 1; g < out.size(); ++g) {
    cur ^= rows_[__builtin_ctzll(g)];
    out[g] = cur;
  }
  return out;
}

std::string Subspace::to_text() const {
  std::ostringstream os;
  os << "n=" << n_ << " dim=" << dim() << "\n";
  for (Word r : rows_) os << BitVec(n_, r).to_string() << "\n";
  return os.str();
}

Subspace Subspace::from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("Subspace::from_text: missing header");
  int n = -1;
  int d = -1;
  if (std::sscanf(header.c_str(), "n=%d dim=%d", &n, &d) != 2) {
    throw std::invalid_argument("Subspace::from_text: bad header '" + header + "'");
  }
  Subspace s(n);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    BitVec v = BitVec::from_string(line);
    check_same(v.size(), n, "Subspace::from_text");
    s.insert(v.bits());
    ++rows;
  }
  if (rows != d || s.dim() != d) {
    throw std::invalid_argument("Subspace::from_text: rows do not form a basis of the stated dimension");
  }
  return s;
}

Subspace dual(const Subspace& a) {
  const int n = a.ambient_dim();
  Word pivots = 0;
  for (Word r : a.basis()) pivots |= Word{1} << highest_bit(r);
  Subspace out(n);
  for (int f = 0; f < n; ++f) {
    if ((pivots >> f) & 1u) continue;
    Word y = Word{1} << f;
    for (Word r : a.basis()) {
      if ((r >> f) & 1u) y |= Word{1} << highest_bit(r);
    }
    out.insert(y);
  }
  return out;
}

Subspace sum(const Subspace& a, const Subspace& b) {
  check_same(a.ambient_dim(), b.ambient_dim(), "sum");
  Subspace out = a;
  for (Word r : b.basis()) out.insert(r);
  return out;
}

int intersection_dim(const Subspace& a, const Subspace& b) {
  check_same(a.ambient_dim(), b.ambient_dim(), "intersection_dim");
  return a.dim() + b.dim() - sum(a, b).dim();
}

int rank_of(std::span<const Word> vectors) {
  std::vector<Word> rows;
  for (Word v : vectors) {
    for (Word r : rows) {
      if ((v >> highest_bit(r)) & 1u) v ^= r;
    }
    if (v != 0) {
      rows.push_back(v);
      std::sort(rows.begin(), rows.end(), std::greater<>());
    }
  }
  return static_cast<int>(rows.size());
}

Subspace random_subspace(int n, int dim, Rng& rng) {
  check_ambient_dim(n);
  if (dim < 0 || dim > n) throw std::invalid_argument("random_subspace: invalid dim");
  const Word mask = low_mask(n);
  while (true) {
    Subspace s(n);
    bool full_rank = true;
    for (int i = 0; i < dim; ++i) {
      if (!s.insert(static_cast<Word>(rng.next_u64()) & mask)) {
        full_rank = false;
        break;
      }
    }
    if (full_rank) return s;
  }
}

Subspace random_neighbor(const Subspace& a, Rng& rng) {
  const int n = a.ambient_dim();
  const int k = a.dim();
  if (k == 0 || k == n) {
    throw std::invalid_argument("random_neighbor: needs 0 < dim A < n");
  }
  const Word mask = low_mask(n);
  // A uniform hyperplane of A is the kernel of a uniform nonzero functional on A.
  Word coeffs = 0;
  while (coeffs == 0) coeffs = static_cast<Word>(rng.below(Word{1} << k));
  std::vector<BitVec> basis = a.basis_vectors();
  std::vector<Word> hyperplane;
  int anchor = __builtin_ctz(coeffs);
  for (int i = 0; i < k; ++i) {
    if (i == anchor) continue;
    Word v = basis[i].bits();
    if ((coeffs >> i) & 1u) v ^= basis[anchor].bits();
    hyperplane.push_back(v);
  }
  Word v = 0;
  do {
    v = static_cast<Word>(rng.next_u64()) & mask;
  } while (a.contains_word(v));
  hyperplane.push_back(v);
  return Subspace::span(n, hyperplane);
}

LinMap::LinMap(int n, std::vector<Word> rows) : n_(n), rows_(std::move(rows)) {
  check_ambient_dim(n);
  if (static_cast<int>(rows_.size()) != n) {
    throw std::invalid_argument("LinMap: expected n rows");
  }
  cols_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if ((rows_[i] & ~low_mask(n)) != 0) throw std::invalid_argument("LinMap: row too long");
    for (int j = 0; j < n; ++j) {
      if ((rows_[i] >> j) & 1u) cols_[j] |= Word{1} << i;
    }
  }
}

LinMap LinMap::identity(int n) {
  std::vector<Word> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = Word{1} << i;
  return LinMap(n, std::move(rows));
}

LinMap LinMap::from_columns(int n, std::span<const Word> columns) {
  if (static_cast<int>(columns.size()) != n) {
    throw std::invalid_argument("LinMap::from_columns: expected n columns");
  }
  std::vector<Word> rows(n, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if ((columns[j] >> i) & 1u) rows[i] |= Word{1} << j;
    }
  }
  return LinMap(n, std::move(rows));
}

LinMap LinMap::random_invertible(int n, Rng& rng) {
  const Word mask = low_mask(n);
  while (true) {
    std::vector<Word> rows(n);
    for (Word& r : rows) r = static_cast<Word>(rng.next_u64()) & mask;
    if (rank_of(rows) == n) return LinMap(n, std::move(rows));
  }
}

BitVec LinMap::apply(const BitVec& x) const {
  check_same(x.size(), n_, "LinMap::apply");
  return BitVec(n_, apply_word(x.bits()));
}

int LinMap::rank() const { return rank_of(rows_); }

LinMap LinMap::inverse() const {
  // Gauss-Jordan on [M | I], one word per side.
  std::vector<Word> m = rows_;
  std::vector<Word> inv(n_);
  for (int i = 0; i < n_; ++i) inv[i] = Word{1} << i;
  for (int col = 0; col < n_; ++col) {
    int pivot = -1;
    for (int r = col; r < n_; ++r) {
      if ((m[r] >> col) & 1u) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw std::domain_error("LinMap::inverse: singular matrix");
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    for (int r = 0; r < n_; ++r) {
      if (r != col && ((m[r] >> col) & 1u)) {
        m[r] ^= m[col];
        inv[r] ^= inv[col];
      }
    }
  }
  return LinMap(n_, std::move(inv));
}

LinMap LinMap::transpose() const { return LinMap(n_, cols_); }

LinMap LinMap::inverse_transpose() const { return inverse().transpose(); }

LinMap LinMap::compose(const LinMap& other) const {
  check_same(n_, other.n_, "LinMap::compose");
  std::vector<Word> cols(n_);
  for (int j = 0; j < n_; ++j) cols[j] = apply_word(other.cols_[j]);
  return from_columns(n_, cols);
}

Subspace image(const LinMap& f, const Subspace& a) {
  check_same(f.ambient_dim(), a.ambient_dim(), "image");
  if (!f.invertible()) throw std::domain_error("image: singular matrix");
  std::vector<Word> gens;
  for (Word r : a.basis()) gens.push_back(f.apply_word(r));
  return Subspace::span(a.ambient_dim(), gens);
}

}  // namespace hsm
