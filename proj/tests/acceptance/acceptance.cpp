// Acceptance suite: one check per criterion, selectable with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hsmoney/advlab.hpp"
#include "hsmoney/calibration.hpp"
#include "hsmoney/cli/app.hpp"
#include "hsmoney/composite.hpp"
#include "hsmoney/hsmini.hpp"
#include "hsmoney/polyhide.hpp"
#include "hsmoney/privkey.hpp"
#include "hsmoney/search.hpp"

namespace {

using namespace hsm;

// Pinned tolerances.
constexpr double kEntryTol = 1e-9;
constexpr double kFidelityTol = 1e-9;
constexpr double kClonerTol = 0.01;
constexpr double kSigma = 3.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double std_error(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1) / v.size());
}

// 1. Four-step verifier equals |A><A| entrywise.
Outcome verifier_projector() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng root(101);
  double worst = 0.0;
  for (int n : {4, 6, 8, 10}) {
    for (int t = 0; t < 50; ++t) {
      Rng rng = root.split(n * 1000 + t);
      const Subspace a = random_subspace(n, n / 2, rng);
      // Oracle: |A><A|_{ij} = 2^{-n/2} [i ∈ A][j ∈ A].
      const double w = std::pow(2.0, -n / 2.0);
      const std::size_t dim = std::size_t{1} << n;
      for (std::size_t j = 0; j < dim; ++j) {
        std::vector<Amp> col(dim, 0.0);
        col[j] = 1.0;
        apply_verifier_circuit(a, col);
        const bool jin = a.contains_word(static_cast<Word>(j));
        for (std::size_t i = 0; i < dim; ++i) {
          const double expect = jin && a.contains_word(static_cast<Word>(i)) ? w : 0.0;
          worst = std::max(worst, std::abs(col[i] - expect));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kEntryTol && secs < 60.0,
          "max entry error " + fmt("%.2e", worst) + ", runtime " + fmt("%.1f s", secs)};
}

// 2. Hadamard duality.
Outcome duality() {
  Rng root(202);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(12, 6, rng);
    worst = std::max(worst, std::abs(fidelity(hadamard_all(subspace_state(a)), subspace_state(dual(a))) - 1.0));
  }
  return {worst <= kFidelityTol, "max |F - 1| over 1000 subspaces " + fmt("%.2e", worst)};
}

// 3. Hybrid search budget over the grid with one K.
Outcome hybrid_budget() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double worst_ratio = 0.0;
  for (double eps : {0.02, 0.05, 0.1})
    for (double delta : {0.1, 0.2}) {
      SearchParams sp;
      sp.eps = eps;
      sp.delta = delta;
      sp.enforce_delta_bound = delta >= 2 * eps;
      Rng root = Rng(303).split(static_cast<std::uint64_t>(eps * 1000) * 1000 + static_cast<std::uint64_t>(delta * 1000));
      std::vector<double> q, inf;
      for (int t = 0; t < 200; ++t) {
        Rng rng = root.split(t);
        const SearchProblem p = planted_instance(10, eps, 4, rng);
        const HybridResult h = hybrid_search(p, sp, rng);
        const double f = goal_fidelity(p, h.state);
        q.push_back(static_cast<double>(h.queries));
        inf.push_back(1.0 - f * f);
      }
      const double bound = std::log(1.0 / delta) / (eps * delta * delta);
      const double ratio = mean(q) / bound;
      worst_ratio = std::max(worst_ratio, ratio);
      const bool ok = mean(inf) <= delta && ratio <= kHybridK;
      o.pass = o.pass && ok;
      o.detail += fmt("[e=%.2f ", eps) + fmt("d=%.1f: ", delta) + fmt("ratio %.1f, ", ratio) +
                  fmt("infidelity %.4f] ", mean(inf));
    }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 600.0;
  o.detail += fmt("max ratio %.1f", worst_ratio) + fmt(" <= K=%.0f", kHybridK) + fmt(", runtime %.1f s", secs);
  return o;
}

// 4. Fixed-point monotonicity and reach.
Outcome fixed_point() {
  Outcome o;
  for (auto [eps, delta] : std::vector<std::pair<double, double>>{{0.1, 0.1}, {0.2, 0.05}, {0.3, 0.1}}) {
    const int T = fixed_point_rounds(eps, delta);
    Rng root = Rng(404).split(static_cast<std::uint64_t>(eps * 100));
    std::vector<std::vector<double>> traces;
    for (int t = 0; t < 500; ++t) {
      Rng rng = root.split(t);
      const SearchProblem p = planted_instance(8, eps, 2, rng);
      traces.push_back(fixed_point_trace(p, T, rng));
    }
    bool monotone = true;
    for (int t = 1; t < T; ++t) {
      std::vector<double> diff;
      for (const auto& tr : traces) diff.push_back(tr[t] - tr[t - 1]);
      if (mean(diff) < -kSigma * std_error(diff) - 1e-12) monotone = false;
    }
    std::vector<double> last;
    for (const auto& tr : traces) last.push_back(tr.back());
    const bool reached = mean(last) >= 1.0 - delta;
    o.pass = o.pass && monotone && reached;
    o.detail += fmt("[e=%.1f ", eps) + fmt("d=%.2f: ", delta) + "T=" + std::to_string(T) +
                fmt(", F=%.4f, ", mean(last)) + (monotone ? "monotone] " : "NOT monotone] ");
  }
  o.detail += fmt("c=%.2f", kFixedPointC);
  return o;
}

// 5. Amplifying a planted cloner.
Outcome amplify() {
  Rng root(505);
  Rng brng = root.split(0xb0b);
  const HsMiniScheme mini(make_bundle(8, brng));
  const double eps = 0.2, delta = 0.05;
  int pass = 0;
  std::uint64_t max_q = 0;
  double budget = 0.0, initial = 0.0;
  for (int t = 0; t < 200; ++t) {
    Rng rng = root.split(t);
    Banknote note = mini.bank(rng);
    const PlantedCloner c(note.state, eps);
    const AmplifyResult r = amplify_counterfeiter(c, mini, note.serial, note.state, eps, delta, rng);
    initial = std::max(initial, r.initial_pass);
    StateVector s = r.state;
    pass += verify2(mini, note.serial, s, rng);
    max_q = std::max(max_q, r.queries);
    budget = r.budget;
  }
  const double rate = pass / 200.0;
  return {rate >= 0.95 && max_q <= budget && std::abs(initial - eps) < 1e-9,
          fmt("verify2 pass rate %.3f", rate) + ", max queries " + std::to_string(max_q) +
              fmt(" <= K*formula %.1f", budget) + fmt(" (K=%.1f)", kAmplifyK)};
}

// 6. Per-query progress drop.
Outcome progress() {
  const NeighborSubspaceRelation rel(16);
  Outcome o;
  o.detail = fmt("eps=%.5f; ", rel.epsilon());
  for (const auto& probe : probe_suite()) {
    Rng rng = Rng(606).split(probe->name().size());
    const ProgressTrace tr = track_progress(*probe, rel, 12, 20, rng);
    const bool ok = tr.max_drop_minus_3sigma() <= tr.eps_bound && std::abs(tr.p[0] - 0.5) <= kSigma * tr.p_sd[0] + 1e-9;
    o.pass = o.pass && ok;
    o.detail += probe->name() + fmt(" p0=%.4f", tr.p[0]) + fmt(" maxdrop=%.4f; ", tr.max_drop());
  }
  o.detail += "bound 4 sqrt(eps) = 0.25";
  return o;
}

// 7. Cloning tightness.
Outcome cloning() {
  const int n = 8;
  Rng root(707);
  std::vector<double> hq, sq;
  for (int t = 0; t < 200; ++t) {
    Rng rng = root.split(t);
    const StateVector start = StateVector::uniform(n);
    const StateReflection haar(haar_random_state(n, rng));
    hq.push_back(static_cast<double>(clone_by_search(haar, start, std::pow(2.0, -n / 2.0), rng).queries));
    const StateReflection sub(subspace_state(random_subspace(n, n / 2, rng)));
    sq.push_back(static_cast<double>(clone_by_search(sub, start, std::pow(2.0, -n / 4.0), rng).queries));
  }
  const double hr = median(hq) / (std::numbers::pi / 4 * std::pow(2.0, n / 2.0));
  const double sr = median(sq) / (std::numbers::pi / 4 * std::pow(2.0, n / 4.0));
  return {hr >= 0.5 && hr <= 2.0 && sr >= 0.5 && sr <= 2.0,
          fmt("Haar median/reference %.3f, ", hr) + fmt("subspace median/reference %.3f (window [0.5, 2])", sr)};
}

// 8. Explicit scheme completeness and Z-set uniqueness.
Outcome explicit_completeness() {
  ExplicitParams e;  // n=12, d=4, eps=1/4, beta=12
  Rng root(808);
  int accepts = 0, unique = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(e.n, e.n / 2, rng);
    ExplicitNote note = bank_explicit(e, a, rng);
    accepts += verify_explicit(e, note, rng);
    // Oracle: Z by direct weight counting against the known subspaces.
    auto z_is = [](const PolySystem& s, const Subspace& target) {
      const int thr = noisy_count(s.m(), s.eps);
      for (Word v = 0; v < (Word{1} << s.n); ++v) {
        int w = 0;
        for (const auto& p : s.polys) w += p.eval_word(v);
        if ((w <= thr) != target.contains_word(v)) return false;
      }
      return true;
    };
    unique += z_is(note.s_a, a) && z_is(note.s_aperp, dual(a));
  }
  const double rate = static_cast<double>(unique) / trials;
  return {accepts == trials && rate >= 0.99,
          "honest accepts " + std::to_string(accepts) + "/" + std::to_string(trials) + fmt(", Z=A and Z^perp=A^perp %.3f", rate)};
}

// 9. Exhaustive half-vanishing at n=4, d=2 over every 2-dimensional subspace.
Outcome half_vanishing() {
  const int n = 4, d = 2;
  std::vector<Word> monos;
  for (Word m = 0; m < 16; ++m)
    if (popcount(m) <= d) monos.push_back(m);
  std::vector<std::vector<std::uint8_t>> tables;
  for (std::uint32_t mask = 0; mask < (1u << monos.size()); ++mask) {
    std::vector<std::uint8_t> tb(16, 0);
    for (Word v = 0; v < 16; ++v) {
      int val = 0;
      for (std::size_t i = 0; i < monos.size(); ++i)
        if ((mask >> i) & 1u) val ^= (v & monos[i]) == monos[i];
      tb[v] = static_cast<std::uint8_t>(val);
    }
    tables.push_back(std::move(tb));
  }
  std::set<std::vector<Word>> seen;
  bool ok = true;
  for (Word u = 1; u < 16; ++u)
    for (Word v = u + 1; v < 16; ++v) {
      const std::vector<Word> gens{u, v};
      const Subspace a = Subspace::span(n, gens);
      if (a.dim() != 2 || !seen.insert(a.basis()).second) continue;
      std::vector<const std::vector<std::uint8_t>*> ideal;
      for (const auto& tb : tables) {
        bool vanish = true;
        for (Word x : a.elements()) vanish = vanish && tb[x] == 0;
        if (vanish) ideal.push_back(&tb);
      }
      for (Word x = 0; x < 16; ++x) {
        if (a.contains_word(x)) continue;
        std::size_t zero = 0;
        for (const auto* tb : ideal) zero += (*tb)[x] == 0;
        ok = ok && 2 * zero == ideal.size();
      }
    }
  return {ok && seen.size() == 35, std::to_string(seen.size()) + " subspaces, exact half vanish at every v outside A: " +
                                       (ok ? "yes" : "no")};
}

// 10. Degree-1 break and CLI refusal.
Outcome degree1() {
  ExplicitParams e;
  e.n = 12;
  e.d = 1;
  e.eps = 0.1;
  e.beta = 6;
  e.allow_low_degree = true;
  Rng root(1010);
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(12, 6, rng);
    const ExplicitNote note = bank_explicit(e, a, rng);
    const Degree1Result r = degree1_attack(note.s_a, note.s_aperp);
    ok += r.status == AttackStatus::kRecovered && r.recovered == a;
  }
  const auto dir = std::filesystem::temp_directory_path() / "hsmoney_acceptance_d1";
  std::filesystem::remove_all(dir);
  const std::string dir_s = dir.string();
  const char* argv[] = {"hsmoney", "mint", "--scheme", "explicit", "--dir", dir_s.c_str(), "--d", "1"};
  std::ostringstream out, err;
  const int code = cli::run_cli(8, argv, out, err);
  const bool default_ok = ExplicitParams{}.d >= 4;
  const double rate = ok / 200.0;
  return {rate >= 0.99 && code == cli::kExitUsage && default_ok,
          fmt("recovery rate %.3f", rate) + ", CLI exit on --d 1: " + std::to_string(code)};
}

// 11. Wiesner figures.
Outcome wiesner() {
  // Measure-and-resend by enumeration of the four BB84 inputs.
  double naive = 0.0;
  for (Bb84 b : kBb84States) {
    const Qubit s = bb84_state(b);
    for (int outcome = 0; outcome < 2; ++outcome) {
      const double o2 = overlap2(bb84_state(outcome ? Bb84::kOne : Bb84::kZero), s);
      naive += std::norm(s[outcome]) * o2 * o2 / 4;
    }
  }
  Rng rng(1111);
  const ClonerSearchResult opt = optimize_cloner(20, rng);
  int recovered = 0;
  std::uint64_t queries = 0;
  for (int t = 0; t < 100; ++t) {
    Rng r = rng.split(t);
    NaiveBank bank;
    const WiesnerNote note = bank.mint(16, r);
    const AdaptiveResult a = adaptive_attack(bank, note, default_samples_per_candidate(16), r);
    recovered += a.recovered == bank.record(note.serial);
    queries = std::max(queries, a.queries);
  }
  // Queries per n log2 n across sizes stays bounded.
  double worst_scale = 0.0;
  for (int n : {8, 16, 32, 64}) {
    Rng r = rng.split(5000 + n);
    NaiveBank bank;
    const WiesnerNote note = bank.mint(n, r);
    const AdaptiveResult a = adaptive_attack(bank, note, default_samples_per_candidate(n), r);
    worst_scale = std::max(worst_scale, a.queries / (n * std::log2(n)));
  }
  const double rate = recovered / 100.0;
  const bool ok = std::abs(naive - 0.625) < 1e-15 && std::abs(measure_and_resend().average_success() - 0.625) < 1e-12 &&
                  std::abs(opt.success - 0.75) <= kClonerTol && rate >= 0.9 && worst_scale <= 64.0;
  return {ok, fmt("measure-and-resend %.6f", naive) + fmt(", optimized cloner %.5f", opt.success) +
                  fmt(", adaptive success-rate %.2f", rate) + " with " + std::to_string(queries) +
                  fmt(" queries at n=16, max queries/(n log2 n) %.1f", worst_scale)};
}

// 12. Keyed subspace scheme: perfect completeness, no per-qubit signal.
Outcome keyed() {
  Rng root(1212);
  Rng krng = root.split(1);
  const KeyedSubspaceBank bank = KeyedSubspaceBank::random(16, krng);
  bool complete = true;
  for (int t = 0; t < 50; ++t) {
    Rng rng = root.split(100 + t);
    const std::uint64_t s = bank.mint_serial(rng);
    StateVector st = bank.note(s);
    complete = complete && std::abs(bank.accept_probability(s, st, Register::whole(16)) - 1.0) < 1e-12;
    for (int rep = 0; rep < 3; ++rep) complete = bank.verify(s, st, rng) && complete;
  }
  std::vector<std::array<double, 4>> rates;
  const int samples = 24;
  for (int t = 0; t < 8; ++t) {
    Rng rng = root.split(1000 + t);
    const KeyedAttackResult r = keyed_transplanted_attack(bank, bank.mint_serial(rng), samples, rng, 0);
    rates.insert(rates.end(), r.pass_rates.begin(), r.pass_rates.end());
  }
  Rng srng = root.split(2);
  const SpreadStatistic st = spread_statistic(rates, samples, srng, 4000);
  const bool no_signal = st.observed <= st.null_mean + kSigma * st.null_sd;
  return {complete && no_signal, std::string("completeness ") + (complete ? "exact" : "BROKEN") +
                                     fmt(", spread %.4f", st.observed) + fmt(" vs null %.4f", st.null_mean) +
                                     fmt(" +- %.4f", st.null_sd)};
}

// 13. Completeness amplification and the reduction.
Outcome completeness_amplification() {
  Rng root(1313);
  Rng brng = root.split(0xb0b);
  auto inner = std::make_shared<HsMiniScheme>(make_bundle(4, brng));
  auto base = std::make_shared<NoisyVerifierScheme>(inner, 0.2);
  const double eps = 0.2, eta = 0.1;
  const auto comp = amplify_completeness(base, 60, eta);
  int rejects = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.split(t);
    CompositeNote n = comp->bank(rng);
    rejects += !comp->verify(n.serials, n.states, rng);
  }
  const double err = static_cast<double>(rejects) / trials;
  // Exact error: P[Bin(60, 0.8) < threshold].
  double exact = 0.0;
  for (int j = 0; j < comp->threshold(); ++j)
    exact += std::exp(std::lgamma(61) - std::lgamma(j + 1) - std::lgamma(61 - j) + j * std::log(0.8) +
                      (60 - j) * std::log(0.2));

  const int red_trials = 2000;
  int comp_ok = 0, red_ok = 0;
  for (int t = 0; t < red_trials; ++t) {
    Rng rng = root.split(100000 + t);
    ScriptedCompositeCounterfeiter forger(inner, 8);
    CompositeNote note = comp->bank(rng);
    CompositeForgery f = forger.counterfeit(note, rng);
    comp_ok += comp->verify2(note.serials, f.first, f.second, rng);
    const Banknote target = base->bank(rng);
    auto [a, b] = reduce_composite_counterfeiter(*comp, forger, target, rng);
    red_ok += verify2(*base, target.serial, a, b, rng);
  }
  const double dp = static_cast<double>(comp_ok) / red_trials, rr = static_cast<double>(red_ok) / red_trials;
  const double factor = 1.0 - 2 * eps - 2 * eta;
  const double sigma = std::sqrt(rr * (1 - rr) / red_trials) + factor * std::sqrt(dp * (1 - dp) / red_trials);
  const bool part1 = err <= 0.01;
  const bool part2 = rr >= factor * dp - kSigma * sigma;
  return {part1 && part2, fmt("completeness error %.4f", err) + fmt(" (exact %.4f, target <= 0.01", exact) +
                              (part1 ? ") " : ", FAILS) ") + fmt("; reduction %.4f", rr) +
                              fmt(" vs (1-2e-2h) d' = %.4f", factor * dp) + (part2 ? " ok" : " FAILS")};
}

// 14. End-to-end standard construction.
Outcome end_to_end() {
  Rng root(1414);
  Rng brng = root.split(0xb0b);
  auto mini = std::make_shared<HsMiniScheme>(make_bundle(8, brng));
  const auto money = standard_construction(mini, std::make_shared<MerkleLamport>(10));
  Rng krng = root.split(1);
  const MoneyKeys keys = money->keygen(krng);
  int honest = 0, serial_rej = 0, junk_rej = 0, coset_rej = 0;
  const int notes = 1000;
  for (int t = 0; t < notes; ++t) {
    Rng rng = root.split(100 + t);
    const MoneyNote note = money->bank(keys, rng);
    honest += money->verify(keys.public_key, note, rng);
    MoneyNote altered = note;
    altered.serial[rng.below(altered.serial.size())] ^= static_cast<std::uint8_t>(1u << rng.below(8));
    serial_rej += !money->verify(keys.public_key, altered, rng);
    // Basis state outside A.
    const Subspace a = mini->bundle().subspace_of(*mini->bundle().peek(mini->bundle().decode_serial(note.serial)));
    Word x = 1;
    while (a.contains_word(x)) ++x;
    MoneyNote junk = note;
    junk.state = StateVector::basis(8, x);
    junk_rej += !money->verify(keys.public_key, junk, rng);
    // Coset state |A + x>.
    std::vector<Amp> amps(256, 0.0);
    for (Word y : a.elements()) amps[y ^ x] = 1.0;
    junk.state = StateVector::from_amplitudes(8, amps);
    coset_rej += !money->verify(keys.public_key, junk, rng);
  }
  const bool ok = honest == notes && serial_rej == notes && junk_rej == notes && coset_rej == notes;
  return {ok, "honest " + std::to_string(honest) + "/1000, altered serial rejected " + std::to_string(serial_rej) +
                  "/1000, junk state rejected " + std::to_string(junk_rej) + "/1000, coset state rejected " +
                  std::to_string(coset_rej) + "/1000"};
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<const char*, std::function<Outcome()>>> m = {
      {1, {"verifier correctness", verifier_projector}},
      {2, {"duality", duality}},
      {3, {"hybrid search budget", hybrid_budget}},
      {4, {"fixed-point monotonicity", fixed_point}},
      {5, {"counterfeiter amplification", amplify}},
      {6, {"progress bound", progress}},
      {7, {"cloning tightness", cloning}},
      {8, {"explicit scheme completeness", explicit_completeness}},
      {9, {"half-vanishing", half_vanishing}},
      {10, {"degree-1 break", degree1}},
      {11, {"Wiesner figures", wiesner}},
      {12, {"query-secure contrast", keyed}},
      {13, {"completeness amplification", completeness_amplification}},
      {14, {"end-to-end money scheme", end_to_end}},
  };
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& [id, c] : criteria()) selected.push_back(id);
  bool all = true;
  for (int id : selected) {
    const auto it = criteria().find(id);
    if (it == criteria().end()) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %-30s %s  %s\n", id, it->second.first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
