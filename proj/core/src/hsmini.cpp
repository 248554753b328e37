#include "hsmoney/hsmini.hpp"

#include <stdexcept>

#include <json.hpp>

namespace hsm {

namespace {

constexpr int kFeistelRounds = 8;

std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

}  // namespace

OracleBundle::OracleBundle(int n, std::uint64_t key)
    : n_(n),
      key_(key),
      h_counter_(std::make_shared<QueryCounter>()),
      primal_counter_(std::make_shared<QueryCounter>()),
      dual_counter_(std::make_shared<QueryCounter>()) {
  if (n < 2 || n % 2 != 0 || n > 20) throw std::invalid_argument("OracleBundle: n must be even in [2, 20]");
}

// Balanced Feistel network on 3n bits (3n is even since n is).
std::uint64_t OracleBundle::permute(std::uint64_t x) const {
  const int half = 3 * n_ / 2;
  const std::uint64_t m = low_mask(half);
  std::uint64_t l = x >> half, r = x & m;
  for (int i = 0; i < kFeistelRounds; ++i) {
    const std::uint64_t f = mix64(key_ ^ mix64((std::uint64_t(i) << 40) ^ r)) & m;
    const std::uint64_t nl = r;
    r = l ^ f;
    l = nl;
  }
  return (l << half) | r;
}

std::uint64_t OracleBundle::unpermute(std::uint64_t x) const {
  const int half = 3 * n_ / 2;
  const std::uint64_t m = low_mask(half);
  std::uint64_t l = x >> half, r = x & m;
  for (int i = kFeistelRounds - 1; i >= 0; --i) {
    const std::uint64_t f = mix64(key_ ^ mix64((std::uint64_t(i) << 40) ^ l)) & m;
    const std::uint64_t pr = l;
    l = r ^ f;
    r = pr;
  }
  return (l << half) | r;
}

std::uint64_t OracleBundle::serial_of(std::uint64_t r) const {
  if (r >> n_) throw std::out_of_range("OracleBundle: index out of range");
  return permute(r << (2 * n_));
}

const OracleBundle::Entry& OracleBundle::entry(std::uint64_t r) const {
  std::lock_guard lock(mu_);
  auto it = memo_.find(r);
  if (it != memo_.end()) return *it->second;
  Rng rng(mix64(key_ ^ 0x5eed5eed5eed5eedULL) ^ mix64(r + 1));
  Subspace a = random_subspace(n_, n_ / 2, rng);
  auto e = std::make_unique<Entry>(Entry{a, PhaseOracle::subspace(a, primal_counter_),
                                         PhaseOracle::subspace(hsm::dual(a), dual_counter_)});
  return *memo_.emplace(r, std::move(e)).first->second;
}

Subspace OracleBundle::subspace_of(std::uint64_t r) const {
  if (r >> n_) throw std::out_of_range("OracleBundle: index out of range");
  return entry(r).a;
}

std::optional<std::uint64_t> OracleBundle::peek(std::uint64_t serial) const {
  if (serial >> serial_bits()) return std::nullopt;
  const std::uint64_t x = unpermute(serial);
  if (x & low_mask(2 * n_)) return std::nullopt;
  return x >> (2 * n_);
}

std::optional<std::uint64_t> OracleBundle::lookup(std::uint64_t serial) const {
  h_counter_->charge();
  return peek(serial);
}

PhaseOracle OracleBundle::primal(std::uint64_t serial) const {
  auto r = peek(serial);
  if (!r) return PhaseOracle::none(n_, primal_counter_);
  return entry(*r).primal;
}

PhaseOracle OracleBundle::dual(std::uint64_t serial) const {
  auto r = peek(serial);
  if (!r) return PhaseOracle::none(n_, dual_counter_);
  return entry(*r).dual;
}

Bytes OracleBundle::encode_serial(std::uint64_t serial) const {
  const int len = (serial_bits() + 7) / 8;
  Bytes out(len);
  for (int i = len - 1; i >= 0; --i, serial >>= 8) out[i] = static_cast<std::uint8_t>(serial & 0xff);
  return out;
}

std::uint64_t OracleBundle::decode_serial(const Bytes& bytes) const {
  if (static_cast<int>(bytes.size()) != (serial_bits() + 7) / 8)
    throw std::invalid_argument("serial: wrong length");
  std::uint64_t s = 0;
  for (std::uint8_t b : bytes) s = (s << 8) | b;
  if (s >> serial_bits()) throw std::invalid_argument("serial: stray high bits");
  return s;
}

std::string OracleBundle::snapshot_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["key"] = key_;
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  std::lock_guard lock(mu_);
  for (const auto& [r, e] : memo_) {
    nlohmann::ordered_json basis = nlohmann::ordered_json::array();
    for (const BitVec& v : e->a.basis_vectors()) basis.push_back(v.to_string());
    entries[std::to_string(r)] = {{"serial", to_hex(encode_serial(permute(r << (2 * n_))))},
                                  {"basis", basis}};
  }
  j["entries"] = entries;
  return j.dump(2);
}

std::shared_ptr<OracleBundle> OracleBundle::from_snapshot(const std::string& text) {
  std::shared_ptr<OracleBundle> b;
  try {
    const auto j = nlohmann::json::parse(text);
    b = std::make_shared<OracleBundle>(j.at("n").get<int>(), j.at("key").get<std::uint64_t>());
    for (const auto& [key, e] : j.at("entries").items()) {
      const std::uint64_t r = std::stoull(key);
      if (r >= (std::uint64_t{1} << b->n()) ||
          to_hex(b->encode_serial(b->serial_of(r))) != e.at("serial").get<std::string>())
        throw std::invalid_argument("snapshot: serial mismatch for entry " + key);
      std::vector<BitVec> basis;
      for (const auto& v : e.at("basis")) basis.push_back(BitVec::from_string(v.get<std::string>()));
      Subspace listed = basis.empty() ? Subspace(b->n()) : Subspace::span(basis);
      if (!(listed == b->subspace_of(r))) throw std::invalid_argument("snapshot: subspace mismatch for entry " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("snapshot: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(std::string("snapshot: ") + e.what());
  }
  return b;
}

std::shared_ptr<OracleBundle> make_bundle(int n, Rng& rng) {
  return std::make_shared<OracleBundle>(n, rng.next_u64());
}

HsBanknote bank(const OracleBundle& bundle, Rng& rng) {
  const std::uint64_t r = rng.below(std::uint64_t{1} << bundle.n());
  return {bundle.serial_of(r), subspace_state(bundle.subspace_of(r))};
}

bool verify_with_oracles(const PhaseOracle& primal, const PhaseOracle& dual, StateVector& s,
                         Register reg, Rng& rng) {
  if (!measure_in_place(Projector::onto_oracle(primal), s, rng, reg)) return false;
  apply_hadamard(s, reg);
  const bool ok = measure_in_place(Projector::onto_oracle(dual), s, rng, reg);
  apply_hadamard(s, reg);
  return ok;
}

bool verify(const OracleBundle& bundle, std::uint64_t serial, StateVector& s, Register reg, Rng& rng) {
  if (reg.width != bundle.n()) throw std::invalid_argument("verify: register width mismatch");
  if (!bundle.lookup(serial)) return false;
  return verify_with_oracles(bundle.primal(serial), bundle.dual(serial), s, reg, rng);
}

bool verify(const OracleBundle& bundle, std::uint64_t serial, StateVector& s, Rng& rng) {
  return verify(bundle, serial, s, Register::whole(s.qubits()), rng);
}

void apply_verifier_circuit(const Subspace& a, std::vector<Amp>& amps) {
  const int n = a.ambient_dim();
  if (amps.size() != (std::size_t{1} << n)) throw std::invalid_argument("apply_verifier_circuit: size");
  const Subspace ad = hsm::dual(a);
  for (std::size_t x = 0; x < amps.size(); ++x)
    if (!a.contains_word(static_cast<Word>(x))) amps[x] = 0.0;
  StateVector tmp(n);
  tmp.raw() = std::move(amps);
  apply_hadamard(tmp, Register::whole(n));
  for (std::size_t x = 0; x < tmp.dim(); ++x)
    if (!ad.contains_word(static_cast<Word>(x))) tmp.raw()[x] = 0.0;
  apply_hadamard(tmp, Register::whole(n));
  amps = std::move(tmp.raw());
}

Projector verifier_as_projector(const OracleBundle& bundle, std::uint64_t serial) {
  auto r = bundle.peek(serial);
  if (!r) throw std::invalid_argument("verifier_as_projector: invalid serial");
  return Projector::onto_state(subspace_state(bundle.subspace_of(*r)));
}

RandomizedInstance randomize_instance_with(const LinMap& f, const Subspace& a, const StateVector& state,
                                           const PhaseOracle& primal, const PhaseOracle& dual_oracle) {
  if (!f.invertible()) throw std::invalid_argument("randomize_instance: f must be invertible");
  const LinMap finv = f.inverse();
  const LinMap ft = f.transpose();
  RandomizedInstance out{f,
                         image(f, a),
                         relabel_basis(state, f, Register::whole(state.qubits())),
                         primal.relabeled([&](std::uint64_t x) { return finv.apply_word(static_cast<Word>(x)); }),
                         dual_oracle.relabeled([&](std::uint64_t x) { return ft.apply_word(static_cast<Word>(x)); }),
                         finv};
  return out;
}

RandomizedInstance randomize_instance(const Subspace& a, const StateVector& state,
                                      const PhaseOracle& primal, const PhaseOracle& dual_oracle, Rng& rng) {
  return randomize_instance_with(LinMap::random_invertible(a.ambient_dim(), rng), a, state, primal,
                                 dual_oracle);
}

StateVector undo_randomization(const RandomizedInstance& inst, const StateVector& s, Register reg) {
  return relabel_basis(s, inst.undo, reg);
}

HsMiniScheme::HsMiniScheme(std::shared_ptr<const OracleBundle> bundle) : bundle_(std::move(bundle)) {
  if (!bundle_) throw std::invalid_argument("HsMiniScheme: null bundle");
}

Banknote HsMiniScheme::bank(Rng& rng) const {
  HsBanknote b = hsm::bank(*bundle_, rng);
  return {bundle_->encode_serial(b.serial), std::move(b.state)};
}

std::optional<StateVector> HsMiniScheme::projective_target(const Bytes& serial) const {
  std::uint64_t s = 0;
  try {
    s = bundle_->decode_serial(serial);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  auto r = bundle_->peek(s);
  if (!r) return std::nullopt;
  return subspace_state(bundle_->subspace_of(*r));
}

bool HsMiniScheme::do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const {
  std::uint64_t s = 0;
  try {
    s = bundle_->decode_serial(serial);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return hsm::verify(*bundle_, s, joint, reg, rng);
}

double HsMiniScheme::do_accept_probability(const Bytes& serial, const StateVector& joint,
                                           Register reg) const {
  auto target = projective_target(serial);
  if (!target) return 0.0;
  return Projector::onto_state(*target).accept_probability(joint, reg);
}

}  // namespace hsm
