#include "hsmoney/privkey.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <sodium.h>

namespace hsm {

namespace {

// Unitary whose first column is q, so it maps |0⟩ to q.
Mat2 preparation(const Qubit& q) { return {q[0], -std::conj(q[1]), q[1], std::conj(q[0])}; }

bool is_x_basis(Bb84 b) { return b == Bb84::kPlus || b == Bb84::kMinus; }

constexpr Mat2 kPauliX = {Amp{0}, Amp{1}, Amp{1}, Amp{0}};

void reset_qubit(StateVector& s, int q, Rng& rng) {
  if (measure_register(s, {q, 1}, rng)) apply_1q(s, q, kPauliX);
}

}  // namespace

Qubit bb84_state(Bb84 b) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (b) {
    case Bb84::kZero: return {Amp{1}, Amp{0}};
    case Bb84::kOne: return {Amp{0}, Amp{1}};
    case Bb84::kPlus: return {Amp{r}, Amp{r}};
    case Bb84::kMinus: return {Amp{r}, Amp{-r}};
  }
  throw std::invalid_argument("bb84_state: bad value");
}

const char* bb84_name(Bb84 b) {
  switch (b) {
    case Bb84::kZero: return "0";
    case Bb84::kOne: return "1";
    case Bb84::kPlus: return "+";
    case Bb84::kMinus: return "-";
  }
  return "?";
}

double overlap2(const Qubit& a, const Qubit& b) { return std::norm(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]); }

WiesnerNote NaiveBank::mint(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("NaiveBank::mint: n must be positive");
  WiesnerNote note;
  std::vector<Bb84> rec(n);
  for (int i = 0; i < n; ++i) {
    rec[i] = kBb84States[rng.below(4)];
    note.qubits.push_back(bb84_state(rec[i]));
  }
  std::lock_guard lock(mu_);
  do {
    note.serial = rng.next_u64();
  } while (db_.count(note.serial));
  db_.emplace(note.serial, std::move(rec));
  return note;
}

void NaiveBank::restore(std::uint64_t serial, std::vector<Bb84> rec) {
  std::lock_guard lock(mu_);
  if (!db_.emplace(serial, std::move(rec)).second) throw std::invalid_argument("NaiveBank: serial already present");
}

std::vector<Bb84> NaiveBank::record(std::uint64_t serial) const {
  std::lock_guard lock(mu_);
  auto it = db_.find(serial);
  if (it == db_.end()) throw std::out_of_range("NaiveBank: unknown serial");
  return it->second;
}

std::uint64_t NaiveBank::verifications() const {
  std::lock_guard lock(mu_);
  return verifications_;
}

bool NaiveBank::verify(std::uint64_t serial, std::vector<Qubit>& state, Rng& rng) const {
  const std::vector<Bb84> rec = record(serial);
  {
    std::lock_guard lock(mu_);
    ++verifications_;
  }
  if (state.size() != rec.size()) return false;
  bool ok = true;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    // Measure in the recorded basis; the qubit collapses to the observed basis state.
    const Bb84 expect = rec[i];
    const Bb84 other = is_x_basis(expect) ? (expect == Bb84::kPlus ? Bb84::kMinus : Bb84::kPlus)
                                          : (expect == Bb84::kZero ? Bb84::kOne : Bb84::kZero);
    const bool match = rng.coin(overlap2(bb84_state(expect), state[i]));
    state[i] = bb84_state(match ? expect : other);
    ok = ok && match;
  }
  return ok;
}

double NaiveBank::accept_probability(std::uint64_t serial, const std::vector<Qubit>& state) const {
  const std::vector<Bb84> rec = record(serial);
  if (state.size() != rec.size()) return 0.0;
  double p = 1.0;
  for (std::size_t i = 0; i < rec.size(); ++i) p *= overlap2(bb84_state(rec[i]), state[i]);
  return p;
}

WiesnerNote wiesner_bank(NaiveBank& bank, int n, Rng& rng) { return bank.mint(n, rng); }

bool wiesner_verify(const NaiveBank& bank, std::uint64_t serial, std::vector<Qubit>& state, Rng& rng) {
  return bank.verify(serial, state, rng);
}

double CloningIsometry::success(Bb84 theta) const {
  const Qubit t = bb84_state(theta);
  double p = 0.0;
  for (int e = 0; e < env_dim; ++e) {
    Amp acc = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const Amp out = t[0] * columns[0][a + 2 * b + 4 * e] + t[1] * columns[1][a + 2 * b + 4 * e];
        acc += std::conj(t[a] * t[b]) * out;
      }
    p += std::norm(acc);
  }
  return p;
}

double CloningIsometry::average_success() const {
  double s = 0.0;
  for (Bb84 b : kBb84States) s += success(b);
  return s / 4.0;
}

CloningIsometry measure_and_resend() {
  CloningIsometry v;
  v.env_dim = 2;
  for (int j = 0; j < 2; ++j) {
    v.columns[j].assign(8, 0.0);
    v.columns[j][j + 2 * j + 4 * j] = 1.0;  // |j⟩|j⟩|j⟩_env
  }
  return v;
}

bool clone_and_verify(const NaiveBank& bank, const WiesnerNote& note, const CloningIsometry& channel, Rng& rng) {
  const std::vector<Bb84> rec = bank.record(note.serial);
  if (note.qubits.size() != rec.size()) return false;
  // Both copies go through Ver; the per-qubit pair outcomes are independent.
  bool ok = true;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const Qubit t = bb84_state(rec[i]);
    const Qubit& q = note.qubits[i];
    double p = 0.0;
    for (int e = 0; e < channel.env_dim; ++e) {
      Amp acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          acc += std::conj(t[a] * t[b]) *
                 (q[0] * channel.columns[0][a + 2 * b + 4 * e] + q[1] * channel.columns[1][a + 2 * b + 4 * e]);
      p += std::norm(acc);
    }
    ok = rng.coin(p) && ok;
  }
  return ok;
}

int default_samples_per_candidate(int n) {
  if (n < 1) throw std::invalid_argument("default_samples_per_candidate: n must be positive");
  return static_cast<int>(std::ceil(8.0 * std::log2(4.0 * n) - 1e-9));
}

AdaptiveResult adaptive_attack(const NaiveBank& bank, WiesnerNote note, int samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("adaptive_attack: samples must be positive");
  const std::uint64_t before = bank.verifications();
  AdaptiveResult r;
  const std::size_t n = note.qubits.size();
  r.recovered.resize(n);
  r.pass_rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 4; ++c) {
      int pass = 0;
      for (int k = 0; k < samples; ++k) {
        note.qubits[i] = bb84_state(kBb84States[c]);
        // The bank hands back every qubit; the untouched ones are still the honest states.
        pass += bank.verify(note.serial, note.qubits, rng);
      }
      r.pass_rates[i][c] = static_cast<double>(pass) / samples;
    }
    const auto& rates = r.pass_rates[i];
    r.recovered[i] = kBb84States[std::max_element(rates.begin(), rates.end()) - rates.begin()];
    note.qubits[i] = bb84_state(r.recovered[i]);
  }
  r.queries = bank.verifications() - before;
  return r;
}

KeyedSubspaceBank::KeyedSubspaceBank(int n, Bytes key, KeyedBackend backend, std::uint64_t rf_seed)
    : n_(n), key_(std::move(key)), backend_(backend), rf_rng_(rf_seed) {
  if (n < 2 || n % 2 != 0 || n > kMaxAmbientDim) throw std::invalid_argument("KeyedSubspaceBank: n must be even");
  if (key_.size() < crypto_generichash_KEYBYTES_MIN || key_.size() > crypto_generichash_KEYBYTES_MAX)
    throw std::invalid_argument("KeyedSubspaceBank: key length out of range");
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
}

KeyedSubspaceBank KeyedSubspaceBank::random(int n, Rng& rng, KeyedBackend backend) {
  Bytes key(32);
  for (auto& b : key) b = static_cast<std::uint8_t>(rng.below(256));
  return KeyedSubspaceBank(n, std::move(key), backend, rng.next_u64());
}

// Keyed BLAKE2b of (serial, counter) expanded into n/2 rows; resampled until they are independent.
Subspace KeyedSubspaceBank::prf_subspace(std::uint64_t serial) const {
  const int k = n_ / 2;
  const Word mask = static_cast<Word>((std::uint64_t{1} << n_) - 1);
  for (std::uint32_t counter = 0;; ++counter) {
    std::uint8_t in[12];
    for (int i = 0; i < 8; ++i) in[i] = static_cast<std::uint8_t>(serial >> (8 * i));
    for (int i = 0; i < 4; ++i) in[8 + i] = static_cast<std::uint8_t>(counter >> (8 * i));
    std::uint8_t out[64];
    crypto_generichash(out, sizeof out, in, sizeof in, key_.data(), key_.size());
    std::vector<Word> rows(k);
    for (int r = 0; r < k; ++r) {
      Word w = 0;
      for (int b = 0; b < 4; ++b) w |= Word{out[4 * r + b]} << (8 * b);
      rows[r] = w & mask;
    }
    Subspace a = Subspace::span(n_, rows);
    if (a.dim() == k) return a;
  }
}

Subspace KeyedSubspaceBank::subspace(std::uint64_t serial) const {
  std::lock_guard lock(mu_);
  auto it = table_.find(serial);
  if (it != table_.end()) return it->second;
  Subspace a = backend_ == KeyedBackend::kPrf ? prf_subspace(serial) : random_subspace(n_, n_ / 2, rf_rng_);
  table_.emplace(serial, a);
  return a;
}

bool KeyedSubspaceBank::verify(std::uint64_t serial, StateVector& s, Register reg, Rng& rng) const {
  if (reg.width != n_) throw std::invalid_argument("keyed verify: register width mismatch");
  const Projector p = Projector::onto_state(note(serial));
  {
    std::lock_guard lock(mu_);
    ++verifications_;
  }
  return measure_in_place(p, s, rng, reg);
}

bool KeyedSubspaceBank::verify(std::uint64_t serial, StateVector& s, Rng& rng) const {
  return verify(serial, s, Register::whole(s.qubits()), rng);
}

double KeyedSubspaceBank::accept_probability(std::uint64_t serial, const StateVector& s, Register reg) const {
  return Projector::onto_state(note(serial)).accept_probability(s, reg);
}

std::uint64_t KeyedSubspaceBank::verifications() const {
  std::lock_guard lock(mu_);
  return verifications_;
}

SpreadStatistic spread_statistic(const std::vector<std::array<double, 4>>& rates, int samples, Rng& rng,
                                 int null_resamples) {
  SpreadStatistic st;
  if (rates.empty()) return st;
  // Null: each qubit's four candidates share that qubit's pooled rate.
  std::vector<std::binomial_distribution<int>> draws;
  for (const auto& r : rates) {
    st.observed += *std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end());
    const double pooled = (r[0] + r[1] + r[2] + r[3]) / 4.0;
    draws.emplace_back(samples, std::clamp(pooled, 0.0, 1.0));
  }
  st.observed /= rates.size();
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < null_resamples; ++t) {
    double spread = 0.0;
    for (auto& draw : draws) {
      int lo = samples, hi = 0;
      for (int c = 0; c < 4; ++c) {
        const int x = draw(rng.engine());
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      spread += static_cast<double>(hi - lo) / samples;
    }
    spread /= rates.size();
    sum += spread;
    sum2 += spread * spread;
  }
  if (null_resamples > 0) {
    st.null_mean = sum / null_resamples;
    st.null_sd = std::sqrt(std::max(0.0, sum2 / null_resamples - st.null_mean * st.null_mean));
  }
  return st;
}

KeyedAttackResult keyed_transplanted_attack(const KeyedSubspaceBank& bank, std::uint64_t serial, int samples,
                                            Rng& rng, int null_resamples) {
  if (samples < 1) throw std::invalid_argument("keyed_transplanted_attack: samples must be positive");
  const int n = bank.n();
  const std::uint64_t before = bank.verifications();
  KeyedAttackResult r;
  r.pass_rates.resize(n);
  r.argmax.resize(n);
  // Qubit n is the parking ancilla.
  StateVector s = bank.note(serial).tensor(StateVector(1));
  std::vector<int> schedule;
  for (int c = 0; c < 4; ++c) schedule.insert(schedule.end(), samples, c);
  for (int i = 0; i < n; ++i) {
    apply_swap(s, i, n);
    std::shuffle(schedule.begin(), schedule.end(), rng.engine());
    std::array<int, 4> pass{};
    for (int c : schedule) {
      reset_qubit(s, i, rng);
      apply_1q(s, i, preparation(bb84_state(kBb84States[c])));
      pass[c] += bank.verify(serial, s, {0, n}, rng);
    }
    for (int c = 0; c < 4; ++c) r.pass_rates[i][c] = static_cast<double>(pass[c]) / samples;
    r.argmax[i] = kBb84States[std::max_element(pass.begin(), pass.end()) - pass.begin()];
    apply_swap(s, i, n);
    reset_qubit(s, n, rng);
  }
  r.queries = bank.verifications() - before;
  const SpreadStatistic st = spread_statistic(r.pass_rates, samples, rng, null_resamples);
  r.mean_spread = st.observed;
  r.null_spread_mean = st.null_mean;
  r.null_spread_sd = st.null_sd;
  return r;
}

}  // namespace hsm
