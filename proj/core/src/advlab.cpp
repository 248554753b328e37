#include "hsmoney/advlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hsm {

namespace {

constexpr Mat2 kPauliX = {Amp{0}, Amp{1}, Amp{1}, Amp{0}};

Mat2 random_unitary_2(Rng& rng) {
  const double two_pi = 2 * std::numbers::pi;
  const Amp ea = std::polar(1.0, two_pi * rng.uniform());
  const Amp ep = std::polar(1.0, two_pi * rng.uniform());
  const Amp ex = std::polar(1.0, two_pi * rng.uniform());
  const double phi = std::asin(std::sqrt(rng.uniform()));
  const double c = std::cos(phi), s = std::sin(phi);
  return {ea * ep * c, ea * ex * s, -ea * std::conj(ex) * s, ea * std::conj(ep) * c};
}

// 2|r⟩⟨r|s⟩ − s.
void reflect_about_state(StateVector& s, const StateVector& r) {
  const Amp c = r.inner(s);
  std::vector<Amp>& a = s.raw();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 2.0 * c * r[i] - a[i];
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1) / v.size());
}

}  // namespace

NeighborSubspaceRelation::NeighborSubspaceRelation(int n) : n_(n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("NeighborSubspaceRelation: n must be even");
  check_qubits(n + 1);
}

double NeighborSubspaceRelation::epsilon() const { return std::ldexp(1.0, -n_ / 2); }

OraclePair NeighborSubspaceRelation::sample(Rng& rng) const {
  const Subspace a = random_subspace(n_, n_ / 2, rng);
  const Subspace b = random_neighbor(a, rng);
  auto side = [&](const Subspace& s) {
    auto u = std::make_shared<PhaseOracle>(PhaseOracle::subspace_star(s));
    return OracleInstance{n_ + 1, subspace_state(s),
                          [u](StateVector& st, Register reg) { apply_oracle(*u, st, reg); }};
  };
  return {side(a), side(b)};
}

HaarOverlapRelation::HaarOverlapRelation(int n, double c) : n_(n), c_(c) {
  check_qubits(n);
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("HaarOverlapRelation: c must lie in [0, 1)");
}

OraclePair HaarOverlapRelation::sample(Rng& rng) const {
  const StateVector psi = haar_random_state(n_, rng);
  StateVector chi = haar_random_state(n_, rng);
  const Amp o = psi.inner(chi);
  for (std::size_t i = 0; i < chi.dim(); ++i) chi.raw()[i] -= o * psi[i];
  chi.normalize();
  std::vector<Amp> phi(psi.dim());
  const double s = std::sqrt(1.0 - c_ * c_);
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = c_ * psi[i] + s * chi[i];
  auto side = [&](const StateVector& t) {
    auto p = std::make_shared<Projector>(Projector::onto_state(t));
    return OracleInstance{n_, t, [p](StateVector& st, Register reg) {
                            std::vector<Amp> proj = st.amplitudes();
                            p->apply_branch(proj, reg, true);
                            for (std::size_t i = 0; i < proj.size(); ++i) st.raw()[i] -= 2.0 * proj[i];
                          }};
  };
  return {side(psi), side(StateVector::from_amplitudes(n_, std::move(phi)))};
}

StateVector ProbeAlgorithm::start(const OracleInstance& o) const {
  const int extra = o.oracle_qubits - o.note.qubits();
  return extra > 0 ? o.note.tensor(StateVector(extra)) : o.note;
}

void HadamardWalkProbe::step(int, StateVector& s, const OracleInstance& o, Rng&) const {
  apply_hadamard(s, Register::whole(s.qubits()));
  o.apply(s, {0, o.oracle_qubits});
}

void RandomLayerProbe::step(int, StateVector& s, const OracleInstance& o, Rng& rng) const {
  for (int q = 0; q < s.qubits(); ++q) apply_1q(s, q, random_unitary_2(rng));
  o.apply(s, {0, o.oracle_qubits});
}

void VerifierLoopProbe::step(int t, StateVector& s, const OracleInstance& o, Rng&) const {
  if (t > 0) {
    apply_hadamard(s, {0, o.note.qubits()});
    if (o.oracle_qubits > o.note.qubits()) apply_1q(s, o.oracle_qubits - 1, kPauliX);
  }
  o.apply(s, {0, o.oracle_qubits});
}

StateVector AmplitudeClonerProbe::start(const OracleInstance& o) const {
  const int extra = o.oracle_qubits - o.note.qubits();
  const StateVector u = StateVector::uniform(o.note.qubits());
  return extra > 0 ? u.tensor(StateVector(extra)) : u;
}

void AmplitudeClonerProbe::step(int, StateVector& s, const OracleInstance& o, Rng&) const {
  o.apply(s, {0, o.oracle_qubits});
  const Register data{0, o.note.qubits()};
  apply_hadamard(s, data);
  reflect_about_zero(s, data);
  apply_hadamard(s, data);
}

std::vector<std::shared_ptr<const ProbeAlgorithm>> probe_suite() {
  return {std::make_shared<NullProbe>(), std::make_shared<HadamardWalkProbe>(),
          std::make_shared<RandomLayerProbe>(), std::make_shared<VerifierLoopProbe>(),
          std::make_shared<AmplitudeClonerProbe>()};
}

double ProgressTrace::max_drop() const {
  return drop.empty() ? 0.0 : *std::max_element(drop.begin(), drop.end());
}

double ProgressTrace::max_drop_minus_3sigma() const {
  double m = -1.0;
  for (std::size_t t = 0; t < drop.size(); ++t) m = std::max(m, drop[t] - 3.0 * drop_sd[t]);
  return m;
}

ProgressTrace track_progress(const ProbeAlgorithm& alg, const PairRelation& relation, int queries, int pairs,
                             Rng& rng) {
  if (queries < 0 || pairs < 1) throw std::invalid_argument("track_progress: bad sizes");
  std::vector<std::vector<double>> per_t(queries + 1), drops(queries);
  for (int i = 0; i < pairs; ++i) {
    Rng pair_rng = rng.split(static_cast<std::uint64_t>(i));
    Rng sample_rng = pair_rng.split(0);
    const OraclePair pair = relation.sample(sample_rng);
    Rng ops_u = pair_rng.split(1);
    Rng ops_v = pair_rng.split(1);
    const double factor = alg.simulates_note() ? 1.0 : std::abs(pair.u.note.inner(pair.v.note));
    StateVector su = alg.start(pair.u), sv = alg.start(pair.v);
    double prev = factor * std::abs(su.inner(sv));
    per_t[0].push_back(prev);
    for (int t = 0; t < queries; ++t) {
      alg.step(t, su, pair.u, ops_u);
      alg.step(t, sv, pair.v, ops_v);
      const double p = factor * std::abs(su.inner(sv));
      per_t[t + 1].push_back(p);
      drops[t].push_back(prev - p);
      prev = p;
    }
  }
  ProgressTrace tr;
  tr.probe = alg.name();
  tr.pairs = pairs;
  tr.eps_bound = 4.0 * std::sqrt(relation.epsilon());
  for (const auto& v : per_t) {
    tr.p.push_back(mean_of(v));
    tr.p_sd.push_back(stderr_of(v));
  }
  for (const auto& v : drops) {
    tr.drop.push_back(mean_of(v));
    tr.drop_sd.push_back(stderr_of(v));
  }
  return tr;
}

PlantedCloner::PlantedCloner(StateVector target, double pass_probability) : target_(std::move(target)) {
  if (!(pass_probability >= 0.0 && pass_probability <= 1.0))
    throw std::invalid_argument("PlantedCloner: pass probability must lie in [0, 1]");
  std::size_t junk = target_.dim();
  for (std::size_t x = target_.dim(); x-- > 0;)
    if (std::abs(target_[x]) < 1e-12) {
      junk = x;
      break;
    }
  if (junk == target_.dim()) throw std::invalid_argument("PlantedCloner: no basis state orthogonal to target");
  const double c = std::sqrt(pass_probability), s = std::sqrt(1.0 - pass_probability);
  std::vector<Amp> w(target_.dim());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = c * target_[i];
  w[junk] += s;
  // A global phase on W|0⟩ makes its |0⟩ component real, as the reflection needs.
  if (std::abs(w[0]) > 1e-15) {
    const Amp ph = std::conj(w[0]) / std::abs(w[0]);
    for (Amp& x : w) x *= ph;
  }
  w0_ = StateVector::from_amplitudes(target_.qubits(), w);
  u_ = w;
  for (Amp& x : u_) x = -x;
  u_[0] += 1.0;
  double nrm = 0.0;
  for (const Amp& x : u_) nrm += std::norm(x);
  nrm = std::sqrt(nrm);
  if (nrm < 1e-12) {
    u_.clear();
  } else {
    for (Amp& x : u_) x /= nrm;
  }
}

void PlantedCloner::apply(StateVector& s) const {
  const int q = target_.qubits();
  if (s.qubits() != 2 * q) throw std::invalid_argument("PlantedCloner: wrong register size");
  if (u_.empty()) return;
  const std::size_t d = std::size_t{1} << q;
  std::vector<Amp>& a = s.raw();
  for (std::size_t i = 0; i < d; ++i) {
    Amp dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) dot += std::conj(u_[j]) * a[i + (j << q)];
    if (dot == Amp{0}) continue;
    for (std::size_t j = 0; j < d; ++j) a[i + (j << q)] -= 2.0 * u_[j] * dot;
  }
}

void check_unitary(const Counterfeiter& c, Rng& rng, double tol) {
  const StateVector x = haar_random_state(c.total_qubits(), rng);
  StateVector y = x;
  c.apply(y);
  if (std::abs(y.norm() - 1.0) > tol) throw std::invalid_argument("counterfeiter is not norm-preserving");
  c.apply_inverse(y);
  if (std::abs(std::abs(x.inner(y)) - 1.0) > tol || std::abs(x.inner(y) - Amp{1}) > tol)
    throw std::invalid_argument("counterfeiter inverse does not undo it");
}

double amplification_budget(double eps, double delta) {
  if (!(eps > 0.0 && eps <= 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("amplification_budget: parameters out of range");
  return std::log(1.0 / delta) / (std::sqrt(eps) * (std::sqrt(eps) + delta * delta));
}

AmplifyResult amplify_counterfeiter(const Counterfeiter& c, const MiniScheme& scheme, const Bytes& serial,
                                    const StateVector& note, double eps, double delta, Rng& rng,
                                    double calib_k) {
  const auto target = scheme.projective_target(serial);
  if (!target) throw std::invalid_argument("amplify_counterfeiter: scheme is not projective");
  const int q = c.note_qubits();
  if (note.qubits() != q || target->qubits() != q)
    throw std::invalid_argument("amplify_counterfeiter: note size mismatch");
  Rng check_rng = rng.split(0x636865636bULL);
  check_unitary(c, check_rng);

  auto ver = std::make_shared<QueryCounter>();
  auto calls = std::make_shared<QueryCounter>();
  const StateVector init0 = note.tensor(StateVector(q));
  StateVector start = init0;
  c.apply(start);
  calls->charge();

  AmplifyResult out;
  out.budget = calib_k * amplification_budget(eps, delta);
  const StateVector goal_state = target->tensor(*target);
  const Projector goal_proj = Projector::onto_state(goal_state);
  out.initial_pass = goal_proj.accept_probability(start, Register::whole(2 * q));
  out.eps_claim_violated = out.initial_pass < 0.5 * eps;

  // Ver2 is two Ver calls.
  auto goal = std::make_shared<CallbackReflection>(
      CallbackReflection::Ops{2 * q,
                              [&](StateVector& s) {
                                ver->charge(2);
                                std::vector<Amp> p = s.amplitudes();
                                goal_proj.apply_branch(p, Register::whole(2 * q), true);
                                for (std::size_t i = 0; i < p.size(); ++i) s.raw()[i] -= 2.0 * p[i];
                              },
                              [&](StateVector& s, Rng& r) {
                                ver->charge(2);
                                return measure_in_place(goal_proj, s, r, Register::whole(2 * q));
                              },
                              [&](const StateVector& s) {
                                return goal_proj.accept_probability(s, Register::whole(2 * q));
                              }},
      ver);
  // Projector onto C|note⟩|0⟩ as C (P_note ⊗ |0⟩⟨0|) C⁻¹; the |0⟩ check needs no query.
  const Projector init_proj = Projector::onto_state(init0);
  auto init = std::make_shared<CallbackReflection>(
      CallbackReflection::Ops{2 * q,
                              [&](StateVector& s) {
                                c.apply_inverse(s);
                                std::vector<Amp> p = s.amplitudes();
                                init_proj.apply_branch(p, Register::whole(2 * q), true);
                                for (std::size_t i = 0; i < p.size(); ++i) s.raw()[i] -= 2.0 * p[i];
                                c.apply(s);
                                calls->charge(2);
                                ver->charge();
                              },
                              [&](StateVector& s, Rng& r) {
                                c.apply_inverse(s);
                                const bool ok = measure_in_place(init_proj, s, r, Register::whole(2 * q));
                                c.apply(s);
                                calls->charge(2);
                                ver->charge();
                                return ok;
                              },
                              [&](const StateVector& s) { return std::norm(start.inner(s)); }},
      calls);

  constexpr int kRoundCost = 5;  // Ver2 plus C⁻¹, Ver, C
  const int rounds = std::max(1, static_cast<int>(std::floor((out.budget - 1.0) / kRoundCost)));
  const SearchProblem problem{init, goal, start};
  FixedPointResult fp = fixed_point_search(problem, rounds, rng);
  out.state = std::move(fp.state);
  out.rounds = fp.rounds;
  out.found = fp.found;
  out.queries = ver->count() + calls->count();
  return out;
}

CloneResult clone_by_search(const ReflectionOracle& target, const StateVector& start, double overlap_hint,
                            Rng& rng, int max_attempts) {
  if (target.qubits() != start.qubits()) throw std::invalid_argument("clone_by_search: size mismatch");
  if (max_attempts < 1) throw std::invalid_argument("clone_by_search: max_attempts must be positive");
  const double theta = std::asin(std::clamp(overlap_hint, 1e-12, 1.0));
  const int t0 = static_cast<int>(std::floor(std::numbers::pi / (4.0 * theta)));
  const std::uint64_t before = target.queries();
  CloneResult r;
  for (int attempt = 0; attempt < max_attempts && !r.found; ++attempt) {
    ++r.attempts;
    const int T = attempt == 0 ? t0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(t0) + 1));
    StateVector s = start;
    for (int i = 0; i < T; ++i) {
      target.reflect(s);
      reflect_about_state(s, start);
    }
    r.iterations += T;
    r.found = target.measure(s, rng);
    r.state = std::move(s);
  }
  r.queries = target.queries() - before;
  r.fidelity = r.found ? std::sqrt(std::clamp(target.accept_probability(r.state), 0.0, 1.0)) : 0.0;
  return r;
}

double plane_success_probability(double o2, int T) {
  const double theta = std::asin(std::sqrt(std::clamp(o2, 0.0, 1.0)));
  const double s = std::sin((2.0 * T + 1.0) * theta);
  return s * s;
}

StateVector tensor_power(const StateVector& psi, int k) {
  if (k < 1) throw std::invalid_argument("tensor_power: k must be positive");
  check_qubits(psi.qubits() * k);
  StateVector out = psi;
  for (int i = 1; i < k; ++i) out = out.tensor(psi);
  return out;
}

StateVector kcopy_start_state(const StateVector& psi, const StateVector& u, int k) {
  if (psi.qubits() != u.qubits()) throw std::invalid_argument("kcopy_start_state: size mismatch");
  if (k < 0) throw std::invalid_argument("kcopy_start_state: k must be nonnegative");
  const int n = psi.qubits();
  check_qubits(n * (k + 1));
  std::vector<Amp> acc(std::size_t{1} << (n * (k + 1)), 0.0);
  for (int slot = 0; slot <= k; ++slot) {
    StateVector term = slot == 0 ? u : psi;
    for (int j = 1; j <= k; ++j) term = term.tensor(j == slot ? u : psi);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
  }
  return StateVector::from_amplitudes(n * (k + 1), std::move(acc));
}

double kcopy_start_overlap2(double o2, int k) {
  if (k < 0) throw std::invalid_argument("kcopy_start_overlap2: k must be nonnegative");
  return o2 * (k + 1) / (1.0 + k * o2);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

KcopyReport kcopy_experiment(int n, int k, int trials, Rng& rng) {
  if (n < 1 || k < 0 || trials < 1) throw std::invalid_argument("kcopy_experiment: bad parameters");
  check_qubits(n);
  KcopyReport rep;
  rep.n = n;
  rep.k = k;
  rep.scale = std::pow(2.0, n / 2.0) / std::sqrt(k + 1.0);
  const StateVector u = StateVector::uniform(n);
  const double hint2 = kcopy_start_overlap2(std::ldexp(1.0, -n), k);
  const int t0 = static_cast<int>(std::floor(std::numbers::pi / (4.0 * std::asin(std::sqrt(hint2)))));
  std::vector<double> qs;
  for (int trial = 0; trial < trials; ++trial) {
    Rng tr = rng.split(static_cast<std::uint64_t>(trial));
    const StateVector psi = haar_random_state(n, tr);
    const double o2 = kcopy_start_overlap2(std::norm(psi.inner(u)), k);
    std::uint64_t queries = 0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const int T = attempt == 0 ? t0 : static_cast<int>(tr.below(static_cast<std::uint64_t>(t0) + 1));
      queries += static_cast<std::uint64_t>(T) + 1;
      if (tr.coin(plane_success_probability(o2, T))) break;
    }
    rep.queries.push_back(queries);
    qs.push_back(static_cast<double>(queries));
  }
  rep.median_queries = median(qs);
  return rep;
}

}  // namespace hsm
