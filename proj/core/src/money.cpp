#include "hsmoney/money.hpp"

#include <json.hpp>
#include <stdexcept>

namespace hsm {

MiniScheme::MiniScheme() : verify_counter_(std::make_shared<QueryCounter>()) {}

bool MiniScheme::verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const {
  verify_counter_->charge();
  return do_verify(serial, joint, reg, rng);
}

bool MiniScheme::verify(const Bytes& serial, StateVector& state, Rng& rng) const {
  return verify(serial, state, Register::whole(state.qubits()), rng);
}

double MiniScheme::accept_probability(const Bytes& serial, const StateVector& joint, Register reg) const {
  return do_accept_probability(serial, joint, reg);
}

bool verify2(const MiniScheme& m, const Bytes& serial, StateVector& joint, Rng& rng) {
  const int q = m.note_qubits();
  if (joint.qubits() < 2 * q) throw std::invalid_argument("verify2: joint state too small");
  const bool first = m.verify(serial, joint, Register{0, q}, rng);
  const bool second = m.verify(serial, joint, Register{q, q}, rng);
  return first && second;
}

bool verify2(const MiniScheme& m, const Bytes& serial, const StateVector& first,
             const StateVector& second, Rng& rng) {
  StateVector joint = first.tensor(second);
  return verify2(m, serial, joint, rng);
}

double verify2_probability(const MiniScheme& m, const Bytes& serial, const StateVector& joint) {
  std::optional<StateVector> target = m.projective_target(serial);
  if (!target) throw std::invalid_argument("verify2_probability: scheme is not projective");
  const int q = m.note_qubits();
  Projector p = Projector::onto_state(*target);
  std::vector<Amp> amps = joint.amplitudes();
  p.apply_branch(amps, Register{0, q}, true);
  return p.apply_branch(amps, Register{q, q}, true);
}

NoisyVerifierScheme::NoisyVerifierScheme(std::shared_ptr<const MiniScheme> base, double reject_probability)
    : base_(std::move(base)), reject_probability_(reject_probability) {
  if (!(reject_probability >= 0.0 && reject_probability < 1.0)) {
    throw std::invalid_argument("NoisyVerifierScheme: reject probability must lie in [0, 1)");
  }
}

std::string NoisyVerifierScheme::name() const {
  return base_->name() + "+reject(" + std::to_string(reject_probability_) + ")";
}

double NoisyVerifierScheme::completeness_error() const {
  return 1.0 - (1.0 - base_->completeness_error()) * (1.0 - reject_probability_);
}

bool NoisyVerifierScheme::do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const {
  const bool ok = base_->verify(serial, joint, reg, rng);
  return ok && !rng.coin(reject_probability_);
}

double NoisyVerifierScheme::do_accept_probability(const Bytes& serial, const StateVector& joint,
                                                  Register reg) const {
  return (1.0 - reject_probability_) * base_->accept_probability(serial, joint, reg);
}

bool MoneyScheme::verify(const Bytes& pk, const MoneyNote& note, Rng& rng) const {
  StateVector s = note.state;
  return verify(pk, NoteLabel{note.serial, note.signature}, s, Register::whole(s.qubits()), rng);
}

int count_notes(const MoneyScheme& s, const Bytes& pk, std::span<const NoteLabel> labels,
                StateVector& joint, Rng& rng) {
  const int q = s.note_qubits();
  if (joint.qubits() < q * static_cast<int>(labels.size())) {
    throw std::invalid_argument("count_notes: register smaller than the note list");
  }
  int count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (s.verify(pk, labels[i], joint, Register{static_cast<int>(i) * q, q}, rng)) ++count;
  }
  return count;
}

int count_notes(const MoneyScheme& s, const Bytes& pk, std::span<const MoneyNote> notes, Rng& rng) {
  if (notes.empty()) return 0;
  StateVector joint = notes.front().state;
  std::vector<NoteLabel> labels{{notes.front().serial, notes.front().signature}};
  for (std::size_t i = 1; i < notes.size(); ++i) {
    joint = joint.tensor(notes[i].state);
    labels.push_back({notes[i].serial, notes[i].signature});
  }
  return count_notes(s, pk, labels, joint, rng);
}

StandardMoneyScheme::StandardMoneyScheme(std::shared_ptr<const MiniScheme> mini,
                                         std::shared_ptr<const SignatureScheme> signatures)
    : mini_(std::move(mini)), signatures_(std::move(signatures)) {
  if (!mini_ || !signatures_) throw std::invalid_argument("StandardMoneyScheme: null component");
}

std::string StandardMoneyScheme::name() const { return "standard(" + mini_->name() + ")"; }

MoneyKeys StandardMoneyScheme::keygen(Rng& rng) const {
  SigKeyPair kp = signatures_->keygen(rng);
  return {kp.secret, kp.public_key};
}

MoneyNote StandardMoneyScheme::bank(const MoneyKeys& keys, Rng& rng) const {
  if (!keys.secret) throw std::invalid_argument("StandardMoneyScheme::bank: missing secret key");
  Banknote note = mini_->bank(rng);
  Bytes sig = signatures_->sign(*keys.secret, note.serial);
  return {std::move(note.serial), std::move(sig), std::move(note.state)};
}

bool StandardMoneyScheme::verify(const Bytes& pk, const NoteLabel& label, StateVector& joint,
                                 Register reg, Rng& rng) const {
  if (!signatures_->sverify(pk, label.serial, label.signature)) return false;
  return mini_->verify(label.serial, joint, reg, rng);
}

double StandardMoneyScheme::accept_probability(const Bytes& pk, const NoteLabel& label,
                                               const StateVector& joint, Register reg) const {
  if (!signatures_->sverify(pk, label.serial, label.signature)) return 0.0;
  return mini_->accept_probability(label.serial, joint, reg);
}

std::shared_ptr<MoneyScheme> standard_construction(std::shared_ptr<const MiniScheme> mini,
                                                   std::shared_ptr<const SignatureScheme> signatures) {
  return std::make_shared<StandardMoneyScheme>(std::move(mini), std::move(signatures));
}

MiniFromMoney::MiniFromMoney(std::shared_ptr<const MoneyScheme> money, MoneyKeys keys)
    : money_(std::move(money)), keys_(std::move(keys)) {}

std::string MiniFromMoney::name() const { return "mini(" + money_->name() + ")"; }

namespace {

void put_chunk(Bytes& out, const Bytes& chunk) {
  const std::uint32_t len = static_cast<std::uint32_t>(chunk.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (24 - 8 * i)));
  out.insert(out.end(), chunk.begin(), chunk.end());
}

Bytes take_chunk(const Bytes& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw std::invalid_argument("serial chunk header truncated");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = (len << 8) | in[pos + i];
  pos += 4;
  if (pos + len > in.size()) throw std::invalid_argument("serial chunk truncated");
  Bytes out(in.begin() + static_cast<std::ptrdiff_t>(pos), in.begin() + static_cast<std::ptrdiff_t>(pos + len));
  pos += len;
  return out;
}

}  // namespace

Bytes MiniFromMoney::encode_serial(const Bytes& pk, const NoteLabel& label) {
  Bytes out;
  put_chunk(out, pk);
  put_chunk(out, label.serial);
  put_chunk(out, label.signature);
  return out;
}

std::pair<Bytes, NoteLabel> MiniFromMoney::decode_serial(const Bytes& serial) {
  std::size_t pos = 0;
  Bytes pk = take_chunk(serial, pos);
  NoteLabel label;
  label.serial = take_chunk(serial, pos);
  label.signature = take_chunk(serial, pos);
  if (pos != serial.size()) throw std::invalid_argument("serial has trailing bytes");
  return {std::move(pk), std::move(label)};
}

Banknote MiniFromMoney::bank(Rng& rng) const {
  MoneyNote note = money_->bank(keys_, rng);
  return {encode_serial(keys_.public_key, {note.serial, note.signature}), std::move(note.state)};
}

bool MiniFromMoney::do_verify(const Bytes& serial, StateVector& joint, Register reg, Rng& rng) const {
  std::pair<Bytes, NoteLabel> decoded;
  try {
    decoded = decode_serial(serial);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return money_->verify(decoded.first, decoded.second, joint, reg, rng);
}

double MiniFromMoney::do_accept_probability(const Bytes& serial, const StateVector& joint,
                                            Register reg) const {
  std::pair<Bytes, NoteLabel> decoded;
  try {
    decoded = decode_serial(serial);
  } catch (const std::invalid_argument&) {
    return 0.0;
  }
  return money_->accept_probability(decoded.first, decoded.second, joint, reg);
}

std::string banknote_to_json(const Bytes& serial, const Bytes& signature, const std::string& state_ref) {
  nlohmann::ordered_json j;
  j["serial"] = to_hex(serial);
  if (!signature.empty()) j["sig"] = to_hex(signature);
  j["state_ref"] = state_ref;
  return j.dump();
}

BanknoteRecord banknote_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  BanknoteRecord r;
  r.serial = from_hex(j.at("serial").get<std::string>());
  if (j.contains("sig")) r.signature = from_hex(j.at("sig").get<std::string>());
  r.state_ref = j.at("state_ref").get<std::string>();
  return r;
}

}  // namespace hsm
