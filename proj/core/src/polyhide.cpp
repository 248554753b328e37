#include "hsmoney/polyhide.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hsm {

namespace {

// In-place subset-sum transform over F₂; it is its own inverse.
void subset_transform(std::vector<std::uint8_t>& t, int n) {
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t x = 0; x < t.size(); ++x)
      if (x & bit) t[x] ^= t[x ^ bit];
  }
}

// Columns of an invertible map sending span{e_0..e_{k-1}} onto A.
LinMap frame_of(const Subspace& a) {
  const int n = a.ambient_dim();
  std::vector<Word> cols(a.basis());
  Subspace acc = a;
  for (int j = 0; j < n && static_cast<int>(cols.size()) < n; ++j)
    if (acc.insert(Word{1} << j)) cols.push_back(Word{1} << j);
  return LinMap::from_columns(n, cols);
}

}  // namespace

MultilinearPoly::MultilinearPoly(int n_vars, int degree_bound, std::vector<Word> monomials)
    : n_(n_vars), d_(degree_bound), monomials_(std::move(monomials)) {
  check_ambient_dim(n_vars);
  if (degree_bound < 0) throw std::invalid_argument("MultilinearPoly: negative degree bound");
  std::sort(monomials_.begin(), monomials_.end());
  if (std::adjacent_find(monomials_.begin(), monomials_.end()) != monomials_.end())
    throw std::invalid_argument("MultilinearPoly: duplicate monomial");
  for (Word m : monomials_) {
    if (n_vars < 32 && (m >> n_vars)) throw std::invalid_argument("MultilinearPoly: variable out of range");
    if (popcount(m) > degree_bound) throw std::invalid_argument("MultilinearPoly: monomial exceeds degree bound");
  }
}

int MultilinearPoly::degree() const {
  int d = -1;
  for (Word m : monomials_) d = std::max(d, popcount(m));
  return d;
}

bool MultilinearPoly::eval(const BitVec& v) const {
  if (v.size() != n_) throw std::invalid_argument("eval: length mismatch");
  return eval_word(v.bits());
}

std::string MultilinearPoly::to_text() const {
  if (monomials_.empty()) return "-";
  std::string out;
  for (std::size_t k = 0; k < monomials_.size(); ++k) {
    if (k) out += ' ';
    const Word m = monomials_[k];
    if (m == 0) {
      out += 'c';
      continue;
    }
    bool first = true;
    for (int i = 0; i < n_; ++i) {
      if (!((m >> i) & 1u)) continue;
      if (!first) out += ',';
      out += std::to_string(i + 1);
      first = false;
    }
  }
  return out;
}

MultilinearPoly MultilinearPoly::from_text(int n_vars, int degree_bound, std::string_view text) {
  std::vector<Word> monos;
  std::istringstream in{std::string(text)};
  std::string tok;
  bool zero = false;
  while (in >> tok) {
    if (tok == "-") {
      zero = true;
      continue;
    }
    if (tok == "c") {
      monos.push_back(0);
      continue;
    }
    Word m = 0;
    std::istringstream parts(tok);
    std::string idx;
    while (std::getline(parts, idx, ',')) {
      int v = 0;
      try {
        v = std::stoi(idx);
      } catch (const std::exception&) {
        throw std::invalid_argument("polynomial: bad variable '" + idx + "'");
      }
      if (v < 1 || v > n_vars) throw std::invalid_argument("polynomial: variable out of range");
      if ((m >> (v - 1)) & 1u) throw std::invalid_argument("polynomial: repeated variable");
      m |= Word{1} << (v - 1);
    }
    monos.push_back(m);
  }
  if (zero && !monos.empty()) throw std::invalid_argument("polynomial: '-' mixed with monomials");
  return MultilinearPoly(n_vars, degree_bound, std::move(monos));
}

std::vector<std::uint8_t> truth_table(const MultilinearPoly& p) {
  std::vector<std::uint8_t> t(std::size_t{1} << p.n_vars(), 0);
  for (Word m : p.monomials()) t[m] = 1;
  subset_transform(t, p.n_vars());
  return t;
}

MultilinearPoly from_truth_table(int n_vars, int degree_bound, std::vector<std::uint8_t> table) {
  if (table.size() != (std::size_t{1} << n_vars)) throw std::invalid_argument("from_truth_table: size");
  subset_transform(table, n_vars);
  std::vector<Word> monos;
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (!table[m]) continue;
    if (popcount(static_cast<Word>(m)) > degree_bound)
      throw std::domain_error("from_truth_table: degree bound exceeded");
    monos.push_back(static_cast<Word>(m));
  }
  return MultilinearPoly(n_vars, degree_bound, std::move(monos));
}

MultilinearPoly change_basis(const MultilinearPoly& p, const LinMap& l) {
  if (l.ambient_dim() != p.n_vars()) throw std::invalid_argument("change_basis: dimension mismatch");
  if (!l.invertible()) throw std::domain_error("change_basis: singular map");
  const std::vector<std::uint8_t> t = truth_table(p);
  std::vector<std::uint8_t> q(t.size());
  for (std::size_t v = 0; v < q.size(); ++v) q[v] = t[l.apply_word(static_cast<Word>(v))];
  return from_truth_table(p.n_vars(), p.degree_bound(), std::move(q));
}

MultilinearPoly sample_vanishing(const Subspace& a, int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_vanishing: d must be at least 1");
  const int n = a.ambient_dim();
  const Word low = (Word{1} << a.dim()) - 1;
  // In the frame where A is span{x_1..x_k} a polynomial vanishes on A exactly when every
  // monomial touches one of the remaining variables.
  std::vector<Word> monos;
  for (Word m = 1; m < (Word{1} << n); ++m)
    if (popcount(m) <= d && (m & ~low) && rng.coin(0.5)) monos.push_back(m);
  MultilinearPoly p0(n, d, std::move(monos));
  return change_basis(p0, frame_of(a).inverse());
}

std::string PolySystem::to_text() const {
  char head[96];
  std::snprintf(head, sizeof head, "%d %d %d %.17g\n", n, d, m(), eps);
  std::string out = head;
  for (const auto& p : polys) out += p.to_text() + '\n';
  return out;
}

PolySystem PolySystem::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("system: missing header");
  PolySystem s;
  int m = 0;
  {
    std::istringstream h(line);
    if (!(h >> s.n >> s.d >> m >> s.eps) || s.n < 1 || s.d < 0 || m < 0)
      throw std::invalid_argument("system: bad header");
    std::string extra;
    if (h >> extra) throw std::invalid_argument("system: trailing header fields");
  }
  check_ambient_dim(s.n);
  s.hidden_dim = s.n / 2;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    s.polys.push_back(MultilinearPoly::from_text(s.n, s.d, line));
  }
  if (s.m() != m) throw std::invalid_argument("system: polynomial count does not match header");
  return s;
}

int system_size(int n, double beta) {
  if (beta <= 0) throw std::invalid_argument("system_size: beta must be positive");
  return static_cast<int>(std::ceil(beta * n - 1e-9));
}

int noisy_count(int m, double eps) { return static_cast<int>(std::floor(eps * m + 1e-9)); }

PolySystem sample_noisy_system(const Subspace& a, int d, int m, double eps, Rng& rng) {
  if (eps < 0 || eps >= 1) throw std::invalid_argument("sample_noisy_system: eps must be in [0, 1)");
  if (m < 0) throw std::invalid_argument("sample_noisy_system: negative m");
  PolySystem s;
  s.n = a.ambient_dim();
  s.d = d;
  s.eps = eps;
  s.hidden_dim = a.dim();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  const int noisy = noisy_count(m, eps);
  std::vector<std::uint8_t> is_noisy(m, 0);
  for (int i = 0; i < noisy; ++i) is_noisy[order[i]] = 1;
  for (int i = 0; i < m; ++i) {
    if (is_noisy[i]) {
      s.polys.push_back(sample_vanishing(random_subspace(s.n, a.dim(), rng), d, rng));
      s.noisy_positions.push_back(i);
    } else {
      s.polys.push_back(sample_vanishing(a, d, rng));
    }
  }
  return s;
}

std::vector<std::uint16_t> weights(const PolySystem& sys) {
  std::vector<std::uint16_t> w(std::size_t{1} << sys.n, 0);
  for (const auto& p : sys.polys) {
    const auto t = truth_table(p);
    for (std::size_t v = 0; v < w.size(); ++v) w[v] += t[v];
  }
  return w;
}

int weight(const PolySystem& sys, Word v) {
  int w = 0;
  for (const auto& p : sys.polys) w += p.eval_word(v);
  return w;
}

int zset_threshold(const PolySystem& sys) { return noisy_count(sys.m(), sys.eps); }

bool zset_membership(const PolySystem& sys, const BitVec& v) {
  if (v.size() != sys.n) throw std::invalid_argument("zset_membership: length mismatch");
  return weight(sys, v.bits()) <= zset_threshold(sys);
}

double zset_variant_threshold(const PolySystem& sys) { return (1.0 + sys.eps) * sys.m() / 4.0; }

bool zset_membership_variant(const PolySystem& sys, const BitVec& v) {
  if (v.size() != sys.n) throw std::invalid_argument("zset_membership_variant: length mismatch");
  return weight(sys, v.bits()) <= zset_variant_threshold(sys) + 1e-9;
}

std::vector<std::uint8_t> zset_mask(const PolySystem& sys, bool variant) {
  const auto w = weights(sys);
  std::vector<std::uint8_t> mask(w.size());
  if (variant) {
    const double t = zset_variant_threshold(sys) + 1e-9;
    for (std::size_t v = 0; v < w.size(); ++v) mask[v] = w[v] <= t;
  } else {
    const int t = zset_threshold(sys);
    for (std::size_t v = 0; v < w.size(); ++v) mask[v] = w[v] <= t;
  }
  return mask;
}

bool degenerate(const PolySystem& sys) {
  return std::all_of(sys.polys.begin(), sys.polys.end(), [](const auto& p) { return p.is_zero(); });
}

namespace {

// u with p(v) = u·v; throws when p is not homogeneous linear.
Word linear_form(const MultilinearPoly& p) {
  Word u = 0;
  for (Word m : p.monomials()) {
    if (popcount(m) != 1) throw std::invalid_argument("degree1_attack: polynomial is not homogeneous linear");
    u |= m;
  }
  return u;
}

}  // namespace

Degree1Result degree1_attack(const PolySystem& s_a, const PolySystem& s_aperp) {
  if (s_a.n != s_aperp.n) throw std::invalid_argument("degree1_attack: dimension mismatch");
  const int n = s_a.n;
  Degree1Result r;
  r.recovered = Subspace(n);
  Subspace dual_span(n);
  // u_i ∈ A^⊥ iff the A^⊥ system nearly vanishes at u_i; w_j ∈ A likewise via the A system.
  for (const auto& p : s_a.polys) {
    const Word u = linear_form(p);
    if (weight(s_aperp, u) <= zset_threshold(s_aperp)) {
      ++r.accepted_dual;
      dual_span.insert(u);
    }
  }
  for (const auto& q : s_aperp.polys) {
    const Word w = linear_form(q);
    if (weight(s_a, w) <= zset_threshold(s_a)) {
      ++r.accepted_primal;
      r.recovered.insert(w);
    }
  }
  const int want = s_a.hidden_dim > 0 ? s_a.hidden_dim : n / 2;
  if (r.recovered.dim() < want) {
    r.status = AttackStatus::kInsufficient;
  } else if (r.recovered.dim() > want || !(dual(r.recovered) == sum(dual(r.recovered), dual_span))) {
    r.status = AttackStatus::kInconsistent;
  } else {
    r.status = AttackStatus::kRecovered;
  }
  return r;
}

double span_probability(int r, int k) {
  if (k < r) return 0.0;
  double p = 1.0;
  for (int i = 0; i < r; ++i) p *= 1.0 - std::ldexp(1.0, i - k);
  return p;
}

}  // namespace hsm
