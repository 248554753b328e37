#include "hsmoney/qsim.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace hsm {

namespace {

void check_register(const StateVector& s, Register reg) {
  if (reg.offset < 0 || reg.width < 0 || reg.offset + reg.width > s.qubits()) {
    throw std::out_of_range("register outside state");
  }
}

// Basis index with register value x inserted above `rest`'s low `offset` bits.
inline std::size_t join_index(std::size_t rest, std::size_t x, Register reg) {
  const std::size_t low = rest & ((std::size_t{1} << reg.offset) - 1);
  const std::size_t high = rest >> reg.offset;
  return low | (x << reg.offset) | (high << (reg.offset + reg.width));
}

}  // namespace

int simulator_qubit_cap() {
  static const int cap = [] {
    if (const char* env = std::getenv("HSMONEY_MAX_QUBITS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v >= 1 && v <= 30) return static_cast<int>(v);
      throw std::invalid_argument("HSMONEY_MAX_QUBITS must be an integer in [1, 30]");
    }
    return kDefaultQubitCap;
  }();
  return cap;
}

void check_qubits(int n) {
  if (n < 0) throw std::invalid_argument("negative qubit count");
  if (n > simulator_qubit_cap()) {
    throw std::length_error("state on " + std::to_string(n) + " qubits exceeds simulator cap of " +
                            std::to_string(simulator_qubit_cap()));
  }
}

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  check_qubits(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Amp{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector StateVector::basis(int n, std::uint64_t index) {
  StateVector s(n);
  if (index >= s.dim()) throw std::out_of_range("StateVector::basis: index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

StateVector StateVector::uniform(int n) {
  StateVector s(n);
  const double a = 1.0 / std::sqrt(static_cast<double>(s.dim()));
  for (Amp& x : s.amps_) x = a;
  return s;
}

StateVector StateVector::from_amplitudes(int n, std::vector<Amp> amps) {
  check_qubits(n);
  if (amps.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("StateVector::from_amplitudes: expected 2^n amplitudes");
  }
  StateVector s;
  s.n_ = n;
  s.amps_ = std::move(amps);
  if (s.normalize() == 0.0) throw std::domain_error("StateVector::from_amplitudes: zero vector");
  return s;
}

double StateVector::norm() const {
  double t = 0.0;
  for (const Amp& a : amps_) t += std::norm(a);
  return std::sqrt(t);
}

double StateVector::normalize() {
  const double nrm = norm();
  if (nrm == 0.0) return 0.0;
  const double inv = 1.0 / nrm;
  for (Amp& a : amps_) a *= inv;
  return nrm;
}

Amp StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("StateVector::inner: dimension mismatch");
  Amp t = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) t += std::conj(amps_[i]) * other.amps_[i];
  return t;
}

StateVector StateVector::tensor(const StateVector& high) const {
  check_qubits(n_ + high.n_);
  StateVector out;
  out.n_ = n_ + high.n_;
  out.amps_.resize(dim() * high.dim());
  for (std::size_t h = 0; h < high.dim(); ++h) {
    for (std::size_t l = 0; l < dim(); ++l) out.amps_[(h << n_) | l] = high.amps_[h] * amps_[l];
  }
  return out;
}

std::string StateVector::dump() const {
  std::string out = "n=" + std::to_string(n_) + "\n";
  char buf[96];
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (std::abs(amps_[i]) > 1e-12) {
      std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g\n", i, amps_[i].real(), amps_[i].imag());
      out += buf;
    }
  }
  return out;
}

StateVector StateVector::from_dump(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int n = -1;
  if (!std::getline(is, line) || std::sscanf(line.c_str(), "n=%d", &n) != 1) {
    throw std::invalid_argument("StateVector::from_dump: bad header");
  }
  check_qubits(n);
  std::vector<Amp> amps(std::size_t{1} << n, Amp{0.0, 0.0});
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t idx = 0;
    double re = 0.0;
    double im = 0.0;
    if (!(ls >> idx >> re >> im) || idx >= amps.size()) {
      throw std::invalid_argument("StateVector::from_dump: bad amplitude line '" + line + "'");
    }
    amps[idx] = Amp(re, im);
  }
  StateVector s = from_amplitudes(n, std::move(amps));
  return s;
}

StateVector subspace_state(const Subspace& a) {
  StateVector s(a.ambient_dim());
  s.raw()[0] = 0.0;
  const double amp = std::pow(2.0, -0.5 * a.dim());
  for (Word x : a.elements()) s.raw()[x] = amp;
  return s;
}

void apply_hadamard(StateVector& s, Register reg) {
  check_register(s, reg);
  std::vector<Amp>& a = s.raw();
  const std::size_t n = a.size();
  for (int q = reg.offset; q < reg.offset + reg.width; ++q) {
    const std::size_t h = std::size_t{1} << q;
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const Amp x = a[j];
        const Amp y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
    }
  }
  const double scale = std::pow(2.0, -0.5 * reg.width);
  for (Amp& x : a) x *= scale;
}

StateVector hadamard_all(StateVector s) {
  apply_hadamard(s, Register::whole(s.qubits()));
  return s;
}

void apply_1q(StateVector& s, int qubit, const Mat2& m) {
  check_register(s, {qubit, 1});
  std::vector<Amp>& a = s.raw();
  const std::size_t h = std::size_t{1} << qubit;
  for (std::size_t i = 0; i < a.size(); i += 2 * h) {
    for (std::size_t j = i; j < i + h; ++j) {
      const Amp x = a[j];
      const Amp y = a[j + h];
      a[j] = m[0] * x + m[1] * y;
      a[j + h] = m[2] * x + m[3] * y;
    }
  }
}

void apply_swap(StateVector& s, int qa, int qb) {
  check_register(s, {qa, 1});
  check_register(s, {qb, 1});
  if (qa == qb) return;
  std::vector<Amp>& a = s.raw();
  const std::size_t ma = std::size_t{1} << qa;
  const std::size_t mb = std::size_t{1} << qb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & ma) && !(i & mb)) std::swap(a[i], a[(i ^ ma) | mb]);
  }
}

void reflect_about_zero(StateVector& s, Register reg) {
  check_register(s, reg);
  const std::uint64_t m = reg.mask();
  std::vector<Amp>& a = s.raw();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & m) == 0) a[i] = -a[i];
  }
}

StateVector relabel_basis(const StateVector& s, const LinMap& f, Register reg) {
  check_register(s, reg);
  if (f.ambient_dim() != reg.width) throw std::invalid_argument("relabel_basis: width mismatch");
  StateVector out = s;
  std::vector<Amp>& dst = out.raw();
  const std::vector<Amp>& src = s.amplitudes();
  const std::uint64_t m = reg.mask();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Word x = static_cast<Word>((i & m) >> reg.offset);
    dst[(i & ~m) | (static_cast<std::size_t>(f.apply_word(x)) << reg.offset)] = src[i];
  }
  return out;
}

PhaseOracle::PhaseOracle(int width, std::vector<std::uint8_t> accept_mask, CounterPtr counter)
    : width_(width),
      mask_(std::make_shared<const std::vector<std::uint8_t>>(std::move(accept_mask))),
      counter_(counter ? std::move(counter) : std::make_shared<QueryCounter>()) {
  check_qubits(width);
  if (mask_->size() != (std::size_t{1} << width)) {
    throw std::invalid_argument("PhaseOracle: mask must have 2^width entries");
  }
}

PhaseOracle PhaseOracle::from_predicate(int width, const std::function<bool(std::uint64_t)>& pred,
                                        CounterPtr counter) {
  check_qubits(width);
  std::vector<std::uint8_t> mask(std::size_t{1} << width);
  for (std::size_t x = 0; x < mask.size(); ++x) mask[x] = pred(x) ? 1 : 0;
  return PhaseOracle(width, std::move(mask), std::move(counter));
}

PhaseOracle PhaseOracle::subspace(const Subspace& a, CounterPtr counter) {
  check_qubits(a.ambient_dim());
  std::vector<std::uint8_t> mask(std::size_t{1} << a.ambient_dim(), 0);
  for (Word x : a.elements()) mask[x] = 1;
  return PhaseOracle(a.ambient_dim(), std::move(mask), std::move(counter));
}

PhaseOracle PhaseOracle::subspace_star(const Subspace& a, CounterPtr counter) {
  const int n = a.ambient_dim();
  check_qubits(n + 1);
  std::vector<std::uint8_t> mask(std::size_t{1} << (n + 1), 0);
  for (Word x : a.elements()) mask[x] = 1;
  const std::size_t flag = std::size_t{1} << n;
  for (Word y : dual(a).elements()) mask[flag | y] = 1;
  return PhaseOracle(n + 1, std::move(mask), std::move(counter));
}

PhaseOracle PhaseOracle::none(int width, CounterPtr counter) {
  check_qubits(width);
  return PhaseOracle(width, std::vector<std::uint8_t>(std::size_t{1} << width, 0),
                     std::move(counter));
}

std::uint64_t PhaseOracle::accepted_count() const {
  std::uint64_t c = 0;
  for (std::uint8_t b : *mask_) c += b;
  return c;
}

PhaseOracle PhaseOracle::relabeled(const std::function<std::uint64_t(std::uint64_t)>& g) const {
  std::vector<std::uint8_t> mask(mask_->size());
  for (std::size_t x = 0; x < mask.size(); ++x) mask[x] = (*mask_)[g(x)];
  return PhaseOracle(width_, std::move(mask), counter_);
}

void apply_oracle(const PhaseOracle& u, StateVector& s, Register reg, std::optional<int> control) {
  check_register(s, reg);
  if (reg.width != u.width()) throw std::invalid_argument("apply_oracle: register width mismatch");
  std::size_t cmask = 0;
  if (control) {
    check_register(s, {*control, 1});
    cmask = std::size_t{1} << *control;
    if (cmask & reg.mask()) throw std::invalid_argument("apply_oracle: control inside register");
  }
  std::vector<Amp>& a = s.raw();
  const std::uint64_t m = reg.mask();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & cmask) != cmask) continue;
    if (u.accepts((i & m) >> reg.offset)) a[i] = -a[i];
  }
  u.charge();
}

void apply_oracle(const PhaseOracle& u, StateVector& s) {
  apply_oracle(u, s, Register::whole(s.qubits()));
}

Projector Projector::onto_oracle(PhaseOracle oracle) {
  Projector p;
  p.width_ = oracle.width();
  p.oracle_ = std::move(oracle);
  return p;
}

Projector Projector::onto_mask(int width, std::shared_ptr<const std::vector<std::uint8_t>> mask) {
  if (!mask || mask->size() != (std::size_t{1} << width)) {
    throw std::invalid_argument("Projector::onto_mask: mask must have 2^width entries");
  }
  Projector p;
  p.width_ = width;
  p.mask_ = std::move(mask);
  return p;
}

Projector Projector::onto_state(StateVector target) {
  Projector p;
  p.width_ = target.qubits();
  p.target_ = std::move(target);
  return p;
}

double Projector::apply_branch(std::vector<Amp>& a, Register reg, bool outcome) const {
  const std::uint64_t m = reg.mask();
  double kept = 0.0;
  if (target_) {
    const std::vector<Amp>& phi = target_->amplitudes();
    const std::size_t rest_count = a.size() >> reg.width;
    for (std::size_t r = 0; r < rest_count; ++r) {
      Amp c = 0.0;
      for (std::size_t x = 0; x < phi.size(); ++x) c += std::conj(phi[x]) * a[join_index(r, x, reg)];
      for (std::size_t x = 0; x < phi.size(); ++x) {
        Amp& v = a[join_index(r, x, reg)];
        v = outcome ? phi[x] * c : v - phi[x] * c;
        kept += std::norm(v);
      }
    }
    return kept;
  }
  const std::vector<std::uint8_t>& mask = mask_ ? *mask_ : std::vector<std::uint8_t>();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t x = (i & m) >> reg.offset;
    const bool acc = oracle_ ? oracle_->accepts(x) : mask[x] != 0;
    if (acc != outcome) {
      a[i] = 0.0;
    } else {
      kept += std::norm(a[i]);
    }
  }
  return kept;
}

double Projector::accept_probability(const StateVector& s, Register reg) const {
  check_register(s, reg);
  if (reg.width != width_) throw std::invalid_argument("Projector: register width mismatch");
  const std::uint64_t m = reg.mask();
  const std::vector<Amp>& a = s.amplitudes();
  double p = 0.0;
  if (target_) {
    const std::vector<Amp>& phi = target_->amplitudes();
    const std::size_t rest_count = a.size() >> reg.width;
    for (std::size_t r = 0; r < rest_count; ++r) {
      Amp c = 0.0;
      for (std::size_t x = 0; x < phi.size(); ++x) c += std::conj(phi[x]) * a[join_index(r, x, reg)];
      p += std::norm(c);
    }
    return p;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t x = (i & m) >> reg.offset;
    const bool acc = oracle_ ? oracle_->accepts(x) : (*mask_)[x] != 0;
    if (acc) p += std::norm(a[i]);
  }
  return p;
}

void Projector::charge() const {
  if (oracle_) oracle_->charge();
}

bool measure_in_place(const Projector& p, StateVector& s, Rng& rng, Register reg) {
  const double acc = std::min(1.0, p.accept_probability(s, reg));
  const bool outcome = rng.uniform() < acc;
  p.apply_branch(s.raw(), reg, outcome);
  s.normalize();
  p.charge();
  return outcome;
}

Measurement measure_projector(const Projector& p, StateVector s, Rng& rng, Register reg) {
  Measurement m;
  m.accept_probability = std::min(1.0, p.accept_probability(s, reg));
  m.outcome = rng.uniform() < m.accept_probability;
  p.apply_branch(s.raw(), reg, m.outcome);
  s.normalize();
  p.charge();
  m.post_state = std::move(s);
  return m;
}

Measurement measure_projector(const Projector& p, StateVector s, Rng& rng) {
  const int n = s.qubits();
  return measure_projector(p, std::move(s), rng, Register::whole(n));
}

StateVector project(const Projector& p, StateVector s, bool outcome, Register reg) {
  check_register(s, reg);
  const double kept = p.apply_branch(s.raw(), reg, outcome);
  if (kept < 1e-24) throw std::domain_error("project: requested branch has zero probability");
  s.normalize();
  p.charge();
  return s;
}

std::uint64_t measure_register(StateVector& s, Register reg, Rng& rng) {
  check_register(s, reg);
  std::vector<Amp>& a = s.raw();
  const std::uint64_t m = reg.mask();
  std::vector<double> probs(std::size_t{1} << reg.width, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) probs[(i & m) >> reg.offset] += std::norm(a[i]);
  double u = rng.uniform();
  std::size_t outcome = probs.size() - 1;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    if (u < probs[x]) {
      outcome = x;
      break;
    }
    u -= probs[x];
  }
  while (probs[outcome] == 0.0 && outcome > 0) --outcome;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (((i & m) >> reg.offset) != outcome) a[i] = 0.0;
  }
  s.normalize();
  return outcome;
}

StateVector haar_random_state(int n, Rng& rng) {
  check_qubits(n);
  std::vector<Amp> amps(std::size_t{1} << n);
  for (Amp& a : amps) a = Amp(rng.normal(), rng.normal());
  return StateVector::from_amplitudes(n, std::move(amps));
}

double fidelity(const StateVector& a, const StateVector& b) {
  return std::min(1.0, std::abs(a.inner(b)));
}

double trace_distance(const StateVector& a, const StateVector& b) {
  const double f = fidelity(a, b);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

}  // namespace hsm
