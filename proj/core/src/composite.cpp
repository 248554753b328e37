#include "hsmoney/composite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hsm {

CompositeScheme::CompositeScheme(std::shared_ptr<const MiniScheme> base, int k, double eta)
    : base_(std::move(base)), k_(k), eta_(eta) {
  if (!base_) throw std::invalid_argument("CompositeScheme: null base scheme");
  if (k < 1) throw std::invalid_argument("CompositeScheme: k must be at least 1");
  const double eps = base_->completeness_error();
  if (!(eps < 0.5)) throw std::invalid_argument("CompositeScheme: base completeness error must be < 1/2");
  if (!(eta > 0.0 && eta < (1.0 - 2.0 * eps) / 2.0)) {
    throw std::invalid_argument("CompositeScheme: eta must lie in (0, (1 - 2 eps)/2)");
  }
  // (1 − ε − η)k is often an integer that floating point overshoots (0.7 * 60 = 42.000000000000007).
  threshold_ = static_cast<int>(std::ceil((1.0 - eps - eta) * k - 1e-9));
}

CompositeNote CompositeScheme::bank(Rng& rng) const {
  CompositeNote note;
  for (int i = 0; i < k_; ++i) {
    Banknote b = base_->bank(rng);
    note.serials.push_back(std::move(b.serial));
    note.states.push_back(std::move(b.state));
  }
  return note;
}

int CompositeScheme::accepted_count(const std::vector<Bytes>& serials, std::vector<StateVector>& states,
                                    Rng& rng) const {
  if (static_cast<int>(serials.size()) != k_ || static_cast<int>(states.size()) != k_) return -1;
  int accepted = 0;
  for (int i = 0; i < k_; ++i) {
    if (base_->verify(serials[i], states[i], rng)) ++accepted;
  }
  return accepted;
}

bool CompositeScheme::verify(const std::vector<Bytes>& serials, std::vector<StateVector>& states,
                             Rng& rng) const {
  return accepted_count(serials, states, rng) >= threshold_;
}

bool CompositeScheme::verify2(const std::vector<Bytes>& serials, std::vector<StateVector>& first,
                              std::vector<StateVector>& second, Rng& rng) const {
  const bool a = verify(serials, first, rng);
  const bool b = verify(serials, second, rng);
  return a && b;
}

std::shared_ptr<CompositeScheme> amplify_completeness(std::shared_ptr<const MiniScheme> base, int k,
                                                      double eta) {
  return std::make_shared<CompositeScheme>(std::move(base), k, eta);
}

ScriptedCompositeCounterfeiter::ScriptedCompositeCounterfeiter(std::shared_ptr<const MiniScheme> base,
                                                               int junk_slots)
    : base_(std::move(base)), junk_slots_(junk_slots) {
  if (!base_) throw std::invalid_argument("ScriptedCompositeCounterfeiter: null base scheme");
  if (junk_slots < 0) throw std::invalid_argument("ScriptedCompositeCounterfeiter: negative junk count");
}

CompositeForgery ScriptedCompositeCounterfeiter::counterfeit(const CompositeNote& note, Rng& rng) {
  const std::size_t k = note.states.size();
  if (static_cast<std::size_t>(junk_slots_) > k) throw std::invalid_argument("counterfeit: more junk slots than notes");
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<std::uint8_t> junk(k, 0);
  for (int j = 0; j < junk_slots_; ++j) junk[order[j]] = 1;

  CompositeForgery out{note.states, {}};
  for (std::size_t i = 0; i < k; ++i) {
    auto t = base_->projective_target(note.serials[i]);
    if (!t) throw std::invalid_argument("counterfeit: base scheme is not projective");
    if (!junk[i]) {
      out.second.push_back(std::move(*t));
      continue;
    }
    std::size_t x = 0;
    while (x + 1 < t->dim() && std::abs((*t)[x]) > 1e-12) ++x;
    out.second.push_back(StateVector::basis(t->qubits(), x));
  }
  return out;
}

std::pair<StateVector, StateVector> reduce_composite_counterfeiter(const CompositeScheme& scheme,
                                                                  CompositeCounterfeiter& forger,
                                                                  const Banknote& target, Rng& rng) {
  CompositeNote note = scheme.bank(rng);
  const std::size_t i = rng.below(static_cast<std::uint64_t>(scheme.k()));
  note.serials[i] = target.serial;
  note.states[i] = target.state;
  CompositeForgery out = forger.counterfeit(note, rng);
  if (out.first.size() != note.states.size() || out.second.size() != note.states.size()) {
    throw std::runtime_error("reduce_composite_counterfeiter: forger returned the wrong number of notes");
  }
  return {std::move(out.first[i]), std::move(out.second[i])};
}

}  // namespace hsm
