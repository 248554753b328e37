#include "hsmoney/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsm {

ReflectionOracle::ReflectionOracle(CounterPtr counter)
    : counter_(counter ? std::move(counter) : std::make_shared<QueryCounter>()) {}

SubsetReflection::SubsetReflection(PhaseOracle oracle, int total_qubits, Register reg)
    : ReflectionOracle(oracle.counter()),
      oracle_(oracle),
      projector_(Projector::onto_oracle(oracle)),
      qubits_(total_qubits),
      reg_(reg) {
  if (reg.width != oracle.width() || reg.offset + reg.width > total_qubits) {
    throw std::invalid_argument("SubsetReflection: register does not fit");
  }
}

SubsetReflection::SubsetReflection(PhaseOracle oracle)
    : SubsetReflection(oracle, oracle.width(), Register::whole(oracle.width())) {}

void SubsetReflection::reflect(StateVector& s) const { apply_oracle(oracle_, s, reg_); }

bool SubsetReflection::measure(StateVector& s, Rng& rng) const {
  return measure_in_place(projector_, s, rng, reg_);
}

double SubsetReflection::accept_probability(const StateVector& s) const {
  return projector_.accept_probability(s, reg_);
}

StateReflection::StateReflection(StateVector target, int total_qubits, Register reg, CounterPtr counter)
    : ReflectionOracle(std::move(counter)),
      projector_(Projector::onto_state(std::move(target))),
      qubits_(total_qubits),
      reg_(reg) {
  if (reg.width != projector_.width() || reg.offset + reg.width > total_qubits) {
    throw std::invalid_argument("StateReflection: register does not fit");
  }
}

StateReflection::StateReflection(StateVector target, CounterPtr counter)
    : StateReflection(target, target.qubits(), Register::whole(target.qubits()), std::move(counter)) {}

void StateReflection::reflect(StateVector& s) const {
  std::vector<Amp> projected = s.amplitudes();
  projector_.apply_branch(projected, reg_, true);
  std::vector<Amp>& a = s.raw();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= 2.0 * projected[i];
  charge();
}

bool StateReflection::measure(StateVector& s, Rng& rng) const {
  const bool outcome = measure_in_place(projector_, s, rng, reg_);
  charge();
  return outcome;
}

double StateReflection::accept_probability(const StateVector& s) const {
  return projector_.accept_probability(s, reg_);
}

CallbackReflection::CallbackReflection(Ops ops, CounterPtr counter)
    : ReflectionOracle(std::move(counter)), ops_(std::move(ops)) {
  if (!ops_.reflect || !ops_.measure || !ops_.accept_probability) {
    throw std::invalid_argument("CallbackReflection: all operations are required");
  }
}

double goal_fidelity(const SearchProblem& p, const StateVector& s) {
  return std::sqrt(std::clamp(p.goal->accept_probability(s), 0.0, 1.0));
}

void grover_iterate(const SearchProblem& p, StateVector& s) {
  p.goal->reflect(s);
  p.init->reflect(s);
  for (Amp& a : s.raw()) a = -a;
}

void grover_iterate_inverse(const SearchProblem& p, StateVector& s) {
  p.init->reflect(s);
  p.goal->reflect(s);
  for (Amp& a : s.raw()) a = -a;
}

StateVector amplitude_amplify(const SearchProblem& p, int T) {
  if (T < 0) throw std::invalid_argument("amplitude_amplify: T must be nonnegative");
  StateVector s = p.init_state;
  for (int t = 0; t < T; ++t) grover_iterate(p, s);
  return s;
}

AmplifiedReflection::AmplifiedReflection(SearchProblem problem, int T, StateVector phi_t, bool literal)
    : ReflectionOracle(problem.init->counter()),
      problem_(std::move(problem)),
      T_(T),
      cached_(std::move(phi_t), std::make_shared<QueryCounter>()),
      literal_(literal) {}

void AmplifiedReflection::charge_literal_cost() const {
  problem_.init->charge(2 * static_cast<std::uint64_t>(T_) + 1);
  problem_.goal->charge(2 * static_cast<std::uint64_t>(T_));
}

void AmplifiedReflection::reflect(StateVector& s) const {
  if (literal_) {
    for (int t = 0; t < T_; ++t) grover_iterate_inverse(problem_, s);
    problem_.init->reflect(s);
    for (int t = 0; t < T_; ++t) grover_iterate(problem_, s);
    return;
  }
  cached_.reflect(s);
  charge_literal_cost();
}

bool AmplifiedReflection::measure(StateVector& s, Rng& rng) const {
  if (literal_) {
    for (int t = 0; t < T_; ++t) grover_iterate_inverse(problem_, s);
    const bool outcome = problem_.init->measure(s, rng);
    for (int t = 0; t < T_; ++t) grover_iterate(problem_, s);
    return outcome;
  }
  const bool outcome = cached_.measure(s, rng);
  charge_literal_cost();
  return outcome;
}

double AmplifiedReflection::accept_probability(const StateVector& s) const {
  return cached_.accept_probability(s);
}

FixedPointResult fixed_point_search(const SearchProblem& p, int T, Rng& rng) {
  if (T < 0) throw std::invalid_argument("fixed_point_search: T must be nonnegative");
  FixedPointResult r{p.init_state, 0, false};
  for (int t = 0; t < T; ++t) {
    ++r.rounds;
    if (p.goal->measure(r.state, rng)) {
      r.found = true;
      return r;
    }
    p.init->measure(r.state, rng);
  }
  return r;
}

std::vector<double> fixed_point_trace(const SearchProblem& p, int T, Rng& rng) {
  if (T < 0) throw std::invalid_argument("fixed_point_trace: T must be nonnegative");
  std::vector<double> out;
  out.reserve(T);
  StateVector s = p.init_state;
  bool found = false;
  for (int t = 0; t < T; ++t) {
    if (!found) {
      found = p.goal->measure(s, rng);
      if (!found) p.init->measure(s, rng);
    }
    out.push_back(found ? 1.0 : goal_fidelity(p, s));
  }
  return out;
}

int fixed_point_rounds(double eps, double delta, double calib_c) {
  if (!(eps > 0.0 && eps <= 1.0) || !(delta > 0.0 && delta < 1.0) || !(calib_c > 0.0)) {
    throw std::invalid_argument("fixed_point_rounds: parameters out of range");
  }
  return static_cast<int>(std::ceil(std::log(1.0 / delta) / (eps * eps) / calib_c));
}

double SearchParams::xi() const { return std::asin(eps); }

std::int64_t SearchParams::L() const {
  return static_cast<std::int64_t>(std::ceil(l_const / xi()));
}

std::int64_t SearchParams::R() const {
  const double r = r_const / (delta * delta) * (2.0 + std::log(1.0 / delta)) / calib_c;
  return static_cast<std::int64_t>(std::ceil(r));
}

void SearchParams::validate() const {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("SearchParams: eps must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("SearchParams: delta must lie in (0, 1)");
  if (!(calib_c > 0.0) || !(l_const > 0.0) || !(r_const > 0.0)) {
    throw std::invalid_argument("SearchParams: constants must be positive");
  }
  if (enforce_delta_bound && delta < 2.0 * eps && eps < 1.0) {
    throw std::invalid_argument("SearchParams: hypothesis delta >= 2*eps violated");
  }
}

HybridResult hybrid_search(const SearchProblem& p, const SearchParams& params, Rng& rng) {
  params.validate();
  const std::uint64_t before = p.init->queries() + p.goal->queries();
  HybridResult out;
  out.R = params.R();
  out.T = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(params.L()) + 1));
  StateVector phi = amplitude_amplify(p, static_cast<int>(out.T));
  SearchProblem inner{std::make_shared<AmplifiedReflection>(p, static_cast<int>(out.T), phi), p.goal,
                      phi};
  FixedPointResult fp = fixed_point_search(inner, static_cast<int>(out.R), rng);
  out.state = std::move(fp.state);
  out.rounds = fp.rounds;
  out.found = fp.found;
  out.queries = p.init->queries() + p.goal->queries() - before;
  return out;
}

SearchProblem planted_instance(int n, double eps, int marked, Rng& rng) {
  check_qubits(n);
  const std::size_t dim = std::size_t{1} << n;
  if (marked < 1 || static_cast<std::size_t>(marked) >= dim) throw std::invalid_argument("planted_instance: bad marked count");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("planted_instance: eps must lie in (0, 1)");
  std::vector<std::uint8_t> mask(dim, 0);
  for (int placed = 0; placed < marked;) {
    const std::size_t x = rng.below(dim);
    if (!mask[x]) {
      mask[x] = 1;
      ++placed;
    }
  }
  std::vector<Amp> good(dim, 0.0), rest(dim, 0.0);
  for (std::size_t x = 0; x < dim; ++x) {
    if (mask[x]) good[x] = Amp(rng.normal(), rng.normal());
    else rest[x] = Amp(rng.normal(), rng.normal());
  }
  const StateVector g = StateVector::from_amplitudes(n, std::move(good));
  const StateVector r = StateVector::from_amplitudes(n, std::move(rest));
  std::vector<Amp> init(dim);
  const double s = std::sqrt(1.0 - eps * eps);
  for (std::size_t x = 0; x < dim; ++x) init[x] = eps * g[x] + s * r[x];
  StateVector init_state = StateVector::from_amplitudes(n, std::move(init));
  auto goal = std::make_shared<SubsetReflection>(PhaseOracle(n, std::move(mask), std::make_shared<QueryCounter>()));
  auto ini = std::make_shared<StateReflection>(init_state, std::make_shared<QueryCounter>());
  return {ini, goal, init_state};
}

std::int64_t count_near_lattice(std::int64_t L, double beta, double eta, double gamma) {
  if (!(beta > 0.0)) throw std::invalid_argument("count_near_lattice: beta must be positive");
  std::int64_t count = 0;
  for (std::int64_t T = 0; T <= L; ++T) {
    const double k0 = std::round((static_cast<double>(T) - gamma) / beta);
    for (double k = k0 - 1.0; k <= k0 + 1.0; k += 1.0) {
      if (std::abs(static_cast<double>(T) - (beta * k + gamma)) < eta) {
        ++count;
        break;
      }
    }
  }
  return count;
}

double near_lattice_bound(std::int64_t L, double beta, double eta) {
  return (static_cast<double>(L) / beta + 1.0) * (2.0 * eta + 1.0);
}

}  // namespace hsm
