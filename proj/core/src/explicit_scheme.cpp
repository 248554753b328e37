#include <cmath>
#include <stdexcept>

#include "hsmoney/polyhide.hpp"

namespace hsm {

namespace {

constexpr const char* kSerialSeparator = "%%\n";
constexpr std::size_t kMaskCacheLimit = 64;

using MaskPtr = std::shared_ptr<const std::vector<std::uint8_t>>;

MaskPtr make_mask(const PolySystem& sys, bool variant) {
  return std::make_shared<const std::vector<std::uint8_t>>(zset_mask(sys, variant));
}

bool run_circuit(int n, const MaskPtr& z, const MaskPtr& zperp, StateVector& s, Register reg, Rng& rng) {
  if (!measure_in_place(Projector::onto_mask(n, z), s, rng, reg)) return false;
  apply_hadamard(s, reg);
  const bool ok = measure_in_place(Projector::onto_mask(n, zperp), s, rng, reg);
  apply_hadamard(s, reg);
  return ok;
}

double circuit_probability(int n, const MaskPtr& z, const MaskPtr& zperp, const StateVector& s, Register reg) {
  StateVector t = s;
  const double p1 = Projector::onto_mask(n, z).apply_branch(t.raw(), reg, true);
  if (p1 <= 0.0) return 0.0;
  apply_hadamard(t, reg);
  return Projector::onto_mask(n, zperp).apply_branch(t.raw(), reg, true);
}

// Register 0 of a two-register state whose register 1 holds the basis state x.
StateVector low_register(const StateVector& joint, int n, std::uint64_t x) {
  std::vector<Amp> amps(std::size_t{1} << n);
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = joint[i | (x << n)];
  return StateVector::from_amplitudes(n, std::move(amps));
}

}  // namespace

void ExplicitParams::validate() const {
  if (n < 2 || n % 2 != 0 || n > 20) throw std::invalid_argument("explicit: n must be even in [2, 20]");
  if (d < 1) throw std::invalid_argument("explicit: d must be at least 1");
  if (d < 4 && !allow_low_degree) throw std::invalid_argument("explicit: d < 4 needs allow_low_degree");
  if (d > n) throw std::invalid_argument("explicit: d exceeds n");
  const double eps_max = variant ? 1.0 : 0.5;
  if (eps < 0 || eps >= eps_max) throw std::invalid_argument("explicit: eps out of range");
  if (beta <= 0) throw std::invalid_argument("explicit: beta must be positive");
}

ExplicitNote bank_explicit(const ExplicitParams& params, Rng& rng) {
  params.validate();
  return bank_explicit(params, random_subspace(params.n, params.n / 2, rng), rng);
}

ExplicitNote bank_explicit(const ExplicitParams& params, const Subspace& a, Rng& rng) {
  params.validate();
  if (a.ambient_dim() != params.n) throw std::invalid_argument("bank_explicit: dimension mismatch");
  const int m = params.m();
  ExplicitNote note;
  note.s_a = sample_noisy_system(a, params.d, m, params.eps, rng);
  note.s_aperp = sample_noisy_system(dual(a), params.d, m, params.eps, rng);
  note.state = subspace_state(a);
  return note;
}

bool well_formed(const ExplicitParams& params, const PolySystem& s_a, const PolySystem& s_aperp) {
  for (const PolySystem* s : {&s_a, &s_aperp}) {
    if (s->n != params.n || s->d != params.d || s->m() != params.m()) return false;
    if (std::abs(s->eps - params.eps) > 1e-12) return false;
    for (const auto& p : s->polys)
      if (p.n_vars() != params.n || p.degree() > params.d) return false;
  }
  return true;
}

bool verify_explicit(const ExplicitParams& params, const PolySystem& s_a, const PolySystem& s_aperp,
                     StateVector& s, Register reg, Rng& rng) {
  if (reg.width != params.n || !well_formed(params, s_a, s_aperp)) return false;
  return run_circuit(params.n, make_mask(s_a, params.variant), make_mask(s_aperp, params.variant), s, reg,
                     rng);
}

bool verify_explicit(const ExplicitParams& params, const ExplicitNote& note, Rng& rng) {
  StateVector s = note.state;
  return verify_explicit(params, note.s_a, note.s_aperp, s, Register::whole(s.qubits()), rng);
}

double explicit_accept_probability(const ExplicitParams& params, const PolySystem& s_a,
                                   const PolySystem& s_aperp, const StateVector& s, Register reg) {
  if (reg.width != params.n || !well_formed(params, s_a, s_aperp)) return 0.0;
  return circuit_probability(params.n, make_mask(s_a, params.variant), make_mask(s_aperp, params.variant), s,
                             reg);
}

ExplicitMiniScheme::ExplicitMiniScheme(ExplicitParams params) : params_(params) { params_.validate(); }

Banknote ExplicitMiniScheme::bank(Rng& rng) const {
  ExplicitNote note = bank_explicit(params_, rng);
  return {encode_serial(note.s_a, note.s_aperp), std::move(note.state)};
}

Bytes ExplicitMiniScheme::encode_serial(const PolySystem& s_a, const PolySystem& s_aperp) {
  const std::string text = s_a.to_text() + kSerialSeparator + s_aperp.to_text();
  return Bytes(text.begin(), text.end());
}

std::pair<PolySystem, PolySystem> ExplicitMiniScheme::decode_serial(const Bytes& serial) {
  const std::string text(serial.begin(), serial.end());
  const auto cut = text.find(kSerialSeparator);
  if (cut == std::string::npos) throw std::invalid_argument("explicit serial: missing separator");
  return {PolySystem::from_text(text.substr(0, cut)),
          PolySystem::from_text(text.substr(cut + std::string(kSerialSeparator).size()))};
}

ExplicitMiniScheme::Masks ExplicitMiniScheme::masks(const Bytes& serial) const {
  const std::string key(serial.begin(), serial.end());
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Masks m;
  try {
    auto [s_a, s_aperp] = decode_serial(serial);
    if (well_formed(params_, s_a, s_aperp)) {
      m.ok = true;
      m.z = make_mask(s_a, params_.variant);
      m.zperp = make_mask(s_aperp, params_.variant);
    }
  } catch (const std::invalid_argument&) {
    m.ok = false;
  }
  std::lock_guard lock(mu_);
  if (cache_.size() >= kMaskCacheLimit) cache_.clear();
  cache_.emplace(key, m);
  return m;
}

bool ExplicitMiniScheme::do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const {
  if (reg.width != params_.n) return false;
  const Masks m = masks(serial);
  return m.ok && run_circuit(params_.n, m.z, m.zperp, joint, reg, rng);
}

double ExplicitMiniScheme::do_accept_probability(const Bytes& serial, const StateVector& joint,
                                                 Register reg) const {
  if (reg.width != params_.n) return 0.0;
  const Masks m = masks(serial);
  return m.ok ? circuit_probability(params_.n, m.z, m.zperp, joint, reg) : 0.0;
}

SoundnessReport soundness_experiment(const ExplicitCounterfeiter& forger, const SoundnessParams& params,
                                     Rng& rng) {
  const ExplicitParams& sp = params.scheme;
  sp.validate();
  const int n = sp.n;
  const int harvest = params.harvest > 0 ? params.harvest : 2 * n;
  const int max_prep = params.max_preparations > 0 ? params.max_preparations : 64 * harvest;

  const Subspace a = random_subspace(n, n / 2, rng);
  const ExplicitNote note = bank_explicit(sp, a, rng);
  const MaskPtr z = make_mask(note.s_a, sp.variant);
  const MaskPtr zperp = make_mask(note.s_aperp, sp.variant);
  auto a_mask = std::make_shared<std::vector<std::uint8_t>>(std::size_t{1} << n, 0);
  for (Word x : a.elements()) (*a_mask)[x] = 1;
  const Projector onto_a = Projector::onto_mask(n, a_mask);

  SoundnessReport rep;
  // Each attempt succeeds with probability 2^{-n/2}.
  auto prepare = [&]() -> std::optional<StateVector> {
    const int attempt_cap = 64 << (n / 2);
    for (int i = 0; i < attempt_cap; ++i) {
      ++rep.preparation_attempts;
      StateVector s = StateVector::uniform(n);
      if (measure_in_place(onto_a, s, rng, Register::whole(n))) {
        ++rep.preparations;
        return s;
      }
    }
    return std::nullopt;
  };

  Subspace span(n);
  auto current = prepare();
  while (current && rep.samples < harvest) {
    StateVector out = forger(note.s_a, note.s_aperp, *current, rng);
    ++rep.counterfeiter_calls;
    if (out.qubits() != 2 * n) throw std::invalid_argument("soundness_experiment: forger output has wrong width");
    const bool ok = run_circuit(n, z, zperp, out, {0, n}, rng) && run_circuit(n, z, zperp, out, {n, n}, rng);
    if (ok) {
      const std::uint64_t x = measure_register(out, {n, n}, rng);
      span.insert(static_cast<Word>(x));
      ++rep.samples;
      current = low_register(out, n, x);
    } else {
      current = rep.preparations < max_prep ? prepare() : std::nullopt;
    }
  }
  rep.span_dim = span.dim();
  rep.recovered = span == a;
  return rep;
}

}  // namespace hsm
