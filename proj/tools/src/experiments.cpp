#include "hsmoney/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "hsmoney/advlab.hpp"
#include "hsmoney/calibration.hpp"
#include "hsmoney/composite.hpp"
#include "hsmoney/hsmini.hpp"
#include "hsmoney/polyhide.hpp"
#include "hsmoney/privkey.hpp"
#include "hsmoney/search.hpp"

namespace hsm::cli {

namespace {

std::string fmt(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

std::string frac(long long a, long long b) { return std::to_string(a) + "/" + std::to_string(b); }

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double std_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1) / v.size());
}

Json record(const std::string& id, int trial) { return Json{{"experiment", id}, {"trial", trial}}; }

Json summary_record(const std::string& id, const Params& p, bool passed) {
  return Json{{"experiment", id}, {"params", p.to_json()}, {"passed", passed}};
}

// ---------------------------------------------------------------------------------------------

Report verifier_projector(const Params& p) {
  const int n = p.n;
  struct Out {
    double err = 0.0;
  };
  Rng root(p.seed);
  auto outs = parallel_trials<Out>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(n, n / 2, rng);
    const StateVector s = subspace_state(a);
    const std::size_t dim = s.dim();
    Out o;
    for (std::size_t j = 0; j < dim; ++j) {
      std::vector<Amp> col(dim, 0.0);
      col[j] = 1.0;
      apply_verifier_circuit(a, col);
      for (std::size_t i = 0; i < dim; ++i)
        o.err = std::max(o.err, std::abs(col[i] - s[i] * std::conj(s[j])));
    }
    return o;
  });
  Report r;
  double worst = 0.0;
  for (int t = 0; t < p.trials; ++t) {
    worst = std::max(worst, outs[t].err);
    r.records.push_back(record("verifier-projector", t));
    r.records.back()["max_entry_error"] = outs[t].err;
  }
  r.passed = worst <= 1e-9;
  r.summary = {{"n", std::to_string(n)}, {"subspaces", std::to_string(p.trials)}, {"max entry error", fmt(worst, 3)}};
  return r;
}

Report duality(const Params& p) {
  Rng root(p.seed);
  auto fids = parallel_trials<double>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(p.n, p.n / 2, rng);
    return fidelity(hadamard_all(subspace_state(a)), subspace_state(dual(a)));
  });
  Report r;
  double worst = 0.0;
  for (int t = 0; t < p.trials; ++t) {
    worst = std::max(worst, std::abs(fids[t] - 1.0));
    r.records.push_back(record("duality", t));
    r.records.back()["fidelity"] = fids[t];
  }
  r.passed = worst <= 1e-9;
  r.summary = {{"n", std::to_string(p.n)}, {"trials", std::to_string(p.trials)}, {"max |F - 1|", fmt(worst, 3)}};
  return r;
}

struct HybridCell {
  double mean_queries = 0.0;
  double max_queries = 0.0;
  double mean_infidelity = 0.0;
  double bound = 0.0;
};

HybridCell hybrid_cell(int n, double eps, double delta, int trials, int workers, Rng root, std::vector<Json>* recs) {
  SearchParams sp;
  sp.eps = eps;
  sp.delta = delta;
  sp.enforce_delta_bound = delta >= 2.0 * eps;
  struct Out {
    double q = 0.0, inf = 0.0;
    std::int64_t T = 0;
    int rounds = 0;
  };
  auto outs = parallel_trials<Out>(trials, workers, [&](int t) {
    Rng rng = root.split(t);
    const SearchProblem prob = planted_instance(n, eps, 4, rng);
    const HybridResult h = hybrid_search(prob, sp, rng);
    const double f = goal_fidelity(prob, h.state);
    return Out{static_cast<double>(h.queries), 1.0 - f * f, h.T, h.rounds};
  });
  HybridCell c;
  c.bound = std::log(1.0 / delta) / (eps * delta * delta);
  for (int t = 0; t < trials; ++t) {
    c.mean_queries += outs[t].q / trials;
    c.max_queries = std::max(c.max_queries, outs[t].q);
    c.mean_infidelity += outs[t].inf / trials;
    if (recs) {
      Json j = record("hybrid-search-budget", t);
      j["eps"] = eps;
      j["delta"] = delta;
      j["queries"] = outs[t].q;
      j["T"] = outs[t].T;
      j["rounds"] = outs[t].rounds;
      j["infidelity"] = outs[t].inf;
      recs->push_back(std::move(j));
    }
  }
  return c;
}

Report hybrid_budget(const Params& p) {
  Report r;
  const HybridCell c = hybrid_cell(p.n, p.eps, p.delta, p.trials, p.workers, Rng(p.seed), &r.records);
  const double ratio = c.mean_queries / c.bound;
  r.passed = ratio <= kHybridK && c.mean_infidelity <= p.delta;
  r.summary = {{"eps / delta", fmt(p.eps, 3) + " / " + fmt(p.delta, 3)},
               {"hypothesis delta >= 2 eps", p.delta >= 2 * p.eps ? "yes" : "no (bound not enforced)"},
               {"mean queries", fmt(c.mean_queries, 1)},
               {"log(1/d)/(e d^2)", fmt(c.bound, 1)},
               {"ratio (K = " + fmt(kHybridK, 0) + ")", fmt(ratio, 2)},
               {"mean infidelity", fmt(c.mean_infidelity, 5)}};
  return r;
}

// Expected hybrid_search queries under the exact two-dimensional model of the planted instance.
double hybrid_expected_queries(double eps, double delta) {
  SearchParams sp;
  sp.eps = eps;
  sp.delta = delta;
  const double xi = sp.xi();
  const std::int64_t L = sp.L(), R = sp.R();
  double total = 0.0;
  for (std::int64_t T = 0; T <= L; ++T) {
    const double th = std::asin(std::min(1.0, std::abs(std::sin((2.0 * T + 1.0) * xi))));
    const double shrink = 1.0 - std::pow(std::sin(2 * th), 2) / 2.0;
    double q = 2.0 * T, alive = 1.0;
    for (std::int64_t t = 0; t < R && alive > 1e-15; ++t) {
      q += alive;  // goal measurement
      const double next = t == 0 ? std::pow(std::cos(th), 2) : alive * shrink;
      q += next * (4.0 * T + 1.0);
      alive = next;
    }
    total += q;
  }
  return total / (L + 1);
}

Report hybrid_calibration(const Params& p) {
  Report r;
  double worst_sample = 0.0, worst_model = 0.0;
  for (double eps : {0.02, 0.05, 0.1})
    for (double delta : {0.1, 0.2}) {
      Rng cell_rng = Rng(p.seed).split(static_cast<std::uint64_t>(eps * 1000) * 1000 + static_cast<std::uint64_t>(delta * 1000));
      const HybridCell c = hybrid_cell(p.n, eps, delta, p.trials, p.workers, cell_rng, nullptr);
      const double model = hybrid_expected_queries(eps, delta);
      Json j{{"experiment", "hybrid-calibration"}, {"eps", eps}, {"delta", delta},
             {"sample_ratio", c.mean_queries / c.bound}, {"model_ratio", model / c.bound},
             {"mean_infidelity", c.mean_infidelity}};
      r.records.push_back(std::move(j));
      worst_sample = std::max(worst_sample, c.mean_queries / c.bound);
      worst_model = std::max(worst_model, model / c.bound);
    }
  r.summary = {{"max sample ratio", fmt(worst_sample, 2)},
               {"max model ratio", fmt(worst_model, 2)},
               {"pinned K", fmt(kHybridK, 1)}};
  r.passed = worst_model <= kHybridK;
  return r;
}

Report fixed_point_monotone(const Params& p) {
  const int T = fixed_point_rounds(p.eps, p.delta);
  Rng root(p.seed);
  auto traces = parallel_trials<std::vector<double>>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    const SearchProblem prob = planted_instance(p.n, p.eps, 2, rng);
    return fixed_point_trace(prob, T, rng);
  });
  Report r;
  std::vector<double> means(T), ses(T);
  bool monotone = true;
  for (int t = 0; t < T; ++t) {
    std::vector<double> col(p.trials), diff(p.trials);
    for (int i = 0; i < p.trials; ++i) {
      col[i] = traces[i][t];
      diff[i] = t > 0 ? traces[i][t] - traces[i][t - 1] : 0.0;
    }
    means[t] = mean(col);
    ses[t] = std_error(col);
    if (t > 0 && mean(diff) < -3.0 * std_error(diff) - 1e-12) monotone = false;
    Json j{{"experiment", "fixed-point-monotone"}, {"T", t + 1}, {"mean_fidelity", means[t]}, {"stderr", ses[t]}};
    r.records.push_back(std::move(j));
  }
  const bool reached = means.back() >= 1.0 - p.delta;
  r.passed = monotone && reached;
  r.summary = {{"eps / delta", fmt(p.eps, 3) + " / " + fmt(p.delta, 3)},
               {"rounds (c = " + fmt(kFixedPointC, 2) + ")", std::to_string(T)},
               {"mean fidelity at T", fmt(means.back(), 5)},
               {"nondecreasing (3 sigma)", monotone ? "yes" : "no"}};
  return r;
}

Report fixed_point_calibration(const Params& p) {
  Report r;
  double worst_c = 1e9;
  for (double eps : {0.05, 0.1, 0.2, 0.3, 0.5})
    for (double delta : {0.05, 0.1, 0.2}) {
      const int cap = fixed_point_rounds(eps, delta, 0.25);
      Rng root = Rng(p.seed).split(static_cast<std::uint64_t>(eps * 1000) * 1000 + static_cast<std::uint64_t>(delta * 1000));
      auto traces = parallel_trials<std::vector<double>>(p.trials, p.workers, [&](int t) {
        Rng rng = root.split(t);
        const SearchProblem prob = planted_instance(p.n, eps, 2, rng);
        return fixed_point_trace(prob, cap, rng);
      });
      int needed = cap;
      for (int t = 0; t < cap; ++t) {
        double m = 0.0;
        for (const auto& tr : traces) m += tr[t] / p.trials;
        if (m >= 1.0 - delta) {
          needed = t + 1;
          break;
        }
      }
      const double c = std::log(1.0 / delta) / (eps * eps * needed);
      worst_c = std::min(worst_c, c);
      r.records.push_back(Json{{"experiment", "fixed-point-calibration"}, {"eps", eps}, {"delta", delta},
                               {"rounds_needed", needed}, {"c", c}});
    }
  r.passed = worst_c >= kFixedPointC;
  r.summary = {{"smallest implied c", fmt(worst_c, 3)}, {"pinned c", fmt(kFixedPointC, 3)}};
  return r;
}

struct AmpOut {
  bool pass = false;
  double queries = 0.0;
  double budget = 0.0;
  int rounds = 0;
};

std::vector<AmpOut> amplify_trials(const Params& p, double pass_probability, double k_calib) {
  Rng root(p.seed);
  Rng brng = root.split(0xb0b);
  auto bundle = make_bundle(p.n, brng);
  auto mini = std::make_shared<HsMiniScheme>(bundle);
  return parallel_trials<AmpOut>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    const Banknote note = mini->bank(rng);
    const PlantedCloner c(note.state, pass_probability);
    const AmplifyResult a = amplify_counterfeiter(c, *mini, note.serial, note.state, p.eps, p.delta, rng, k_calib);
    StateVector s = a.state;
    return AmpOut{verify2(*mini, note.serial, s, rng), static_cast<double>(a.queries), a.budget, a.rounds};
  });
}

Report amplify(const Params& p) {
  const auto outs = amplify_trials(p, p.eps, kAmplifyK);
  Report r;
  int pass = 0;
  double maxq = 0.0;
  for (int t = 0; t < p.trials; ++t) {
    pass += outs[t].pass;
    maxq = std::max(maxq, outs[t].queries);
    Json j = record("amplify-counterfeiter", t);
    j["passed_verify2"] = outs[t].pass;
    j["queries"] = outs[t].queries;
    j["rounds"] = outs[t].rounds;
    r.records.push_back(std::move(j));
  }
  const double budget = outs.empty() ? 0.0 : outs[0].budget;
  const double rate = static_cast<double>(pass) / p.trials;
  r.passed = rate >= 0.95 && maxq <= budget;
  r.summary = {{"initial pass probability", fmt(p.eps, 3)},
               {"verify2 pass rate", fmt(rate, 3) + " (" + frac(pass, p.trials) + ")"},
               {"max queries", fmt(maxq, 0)},
               {"budget K*log(1/d)/(sqrt e (sqrt e + d^2))", fmt(budget, 1)}};
  return r;
}

// K must cover the 95th percentile of uncapped queries, since the budget targets a 0.95 pass rate.
Report amplify_calibration(const Params& p) {
  Report r;
  double worst = 0.0;
  for (double pp : {0.1, 0.2, 0.4}) {
    Params q = p;
    q.eps = pp;
    const auto outs = amplify_trials(q, pp, 100.0);
    std::vector<double> queries;
    int pass = 0;
    for (const auto& o : outs) {
      queries.push_back(o.queries);
      pass += o.pass;
    }
    std::sort(queries.begin(), queries.end());
    const double q95 = queries[static_cast<std::size_t>(std::ceil(0.95 * queries.size())) - 1];
    const double ratio = q95 / amplification_budget(pp, p.delta);
    worst = std::max(worst, ratio);
    r.records.push_back(Json{{"experiment", "amplify-calibration"}, {"pass_probability", pp}, {"delta", p.delta},
                             {"q95_query_ratio", ratio}, {"pass_rate", static_cast<double>(pass) / p.trials}});
  }
  r.passed = worst <= kAmplifyK;
  r.summary = {{"95th percentile queries / formula", fmt(worst, 3)}, {"pinned K", fmt(kAmplifyK, 2)}};
  return r;
}

Report innerprod_progress(const Params& p) {
  const NeighborSubspaceRelation rel(p.n);
  Report r;
  bool ok = true;
  for (const auto& probe : probe_suite()) {
    Rng rng = Rng(p.seed).split(std::hash<std::string>{}(probe->name()) & 0xffff);
    const int queries = probe->name() == "null" ? 0 : std::max(1, p.k);
    const ProgressTrace tr = track_progress(*probe, rel, queries, p.trials, rng);
    const bool drop_ok = tr.max_drop_minus_3sigma() <= tr.eps_bound;
    const bool p0_ok = std::abs(tr.p[0] - 0.5) <= 3.0 * tr.p_sd[0] + 1e-9;
    ok = ok && drop_ok && p0_ok;
    r.records.push_back(Json{{"experiment", "innerprod-progress"}, {"probe", tr.probe}, {"p_trace", tr.p},
                             {"max_drop", tr.max_drop()}, {"eps_bound", tr.eps_bound}});
    r.summary.emplace_back(tr.probe, "p0 " + fmt(tr.p[0], 4) + ", max drop " + fmt(tr.max_drop(), 4) + " (bound " +
                                         fmt(tr.eps_bound, 4) + ")");
  }
  r.passed = ok;
  return r;
}

Report clone_tightness(const Params& p) {
  const int n = p.n;
  Rng root(p.seed);
  struct Out {
    double haar = 0.0, sub = 0.0, fid = 1.0;
    int found = 0;
  };
  auto outs = parallel_trials<Out>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    const StateVector start = StateVector::uniform(n);
    Out o;
    {
      const StateReflection target(haar_random_state(n, rng));
      const CloneResult c = clone_by_search(target, start, std::pow(2.0, -n / 2.0), rng);
      o.haar = static_cast<double>(c.queries);
      o.found += c.found;
      if (c.found) o.fid = std::min(o.fid, c.fidelity);
    }
    {
      const StateReflection target(subspace_state(random_subspace(n, n / 2, rng)));
      const CloneResult c = clone_by_search(target, start, std::pow(2.0, -n / 4.0), rng);
      o.sub = static_cast<double>(c.queries);
      o.found += c.found;
      if (c.found) o.fid = std::min(o.fid, c.fidelity);
    }
    return o;
  });
  Report r;
  std::vector<double> hq, sq;
  double fid = 1.0;
  int found = 0;
  for (int t = 0; t < p.trials; ++t) {
    found += outs[t].found;
    hq.push_back(outs[t].haar);
    sq.push_back(outs[t].sub);
    fid = std::min(fid, outs[t].fid);
    Json j = record("clone-tightness", t);
    j["haar_queries"] = outs[t].haar;
    j["subspace_queries"] = outs[t].sub;
    r.records.push_back(std::move(j));
  }
  const double haar_ref = std::numbers::pi / 4 * std::pow(2.0, n / 2.0);
  const double sub_ref = std::numbers::pi / 4 * std::pow(2.0, n / 4.0);
  const double hr = median(hq) / haar_ref, sr = median(sq) / sub_ref;
  r.passed = hr >= 0.5 && hr <= 2.0 && sr >= 0.5 && sr <= 2.0 && fid >= 0.999;
  r.summary = {{"Haar median / (pi/4) 2^(n/2)", fmt(median(hq), 1) + " / " + fmt(haar_ref, 2) + " = " + fmt(hr, 3)},
               {"subspace median / (pi/4) 2^(n/4)", fmt(median(sq), 1) + " / " + fmt(sub_ref, 2) + " = " + fmt(sr, 3)},
               {"clones found", frac(found, 2LL * p.trials)},
               {"min fidelity on success", fmt(fid, 6)}};
  return r;
}

Report kcopy(const Params& p) {
  Report r;
  double prev = 1e300;
  bool decreasing = true;
  for (int k : {0, 1, 2, 4}) {
    Rng rng = Rng(p.seed).split(static_cast<std::uint64_t>(k));
    const KcopyReport rep = kcopy_experiment(p.n, k, p.trials, rng);
    decreasing = decreasing && rep.median_queries < prev;
    prev = rep.median_queries;
    r.records.push_back(Json{{"experiment", "kcopy"}, {"n", p.n}, {"k", k}, {"median_queries", rep.median_queries},
                             {"scale", rep.scale}});
    r.summary.emplace_back("k = " + std::to_string(k),
                           "median " + fmt(rep.median_queries, 1) + ", 2^(n/2)/sqrt(k+1) = " + fmt(rep.scale, 2));
  }
  r.passed = decreasing;
  r.summary.emplace_back("medians decrease with k", decreasing ? "yes" : "no");
  return r;
}

ExplicitParams explicit_params(const Params& p) {
  ExplicitParams e;
  e.n = p.n;
  e.d = p.d;
  e.eps = p.eps;
  e.beta = p.beta;
  return e;
}

Report explicit_mint_verify(const Params& p) {
  const ExplicitParams e = explicit_params(p);
  e.validate();
  Rng root(p.seed);
  struct Out {
    bool accept = false, z = false, zperp = false;
  };
  auto outs = parallel_trials<Out>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(e.n, e.n / 2, rng);
    ExplicitNote note = bank_explicit(e, a, rng);
    Out o;
    o.accept = verify_explicit(e, note, rng);
    auto indicator = [](const Subspace& s) {
      std::vector<std::uint8_t> m(std::size_t{1} << s.ambient_dim(), 0);
      for (Word x : s.elements()) m[x] = 1;
      return m;
    };
    o.z = zset_mask(note.s_a) == indicator(a);
    o.zperp = zset_mask(note.s_aperp) == indicator(dual(a));
    return o;
  });
  Report r;
  int acc = 0, zs = 0;
  for (int t = 0; t < p.trials; ++t) {
    acc += outs[t].accept;
    zs += outs[t].z && outs[t].zperp;
    Json j = record("explicit-mint-verify", t);
    j["accepted"] = outs[t].accept;
    j["z_equals_a"] = outs[t].z;
    j["zperp_equals_aperp"] = outs[t].zperp;
    r.records.push_back(std::move(j));
  }
  const double zrate = static_cast<double>(zs) / p.trials;
  r.passed = acc == p.trials && zrate >= 0.99;
  r.summary = {{"n d eps beta", std::to_string(e.n) + " " + std::to_string(e.d) + " " + fmt(e.eps, 3) + " " + fmt(e.beta, 1)},
               {"honest accepts", frac(acc, p.trials)},
               {"Z = A and Z^perp = A^perp", fmt(zrate, 3)}};
  return r;
}

Report half_vanishing(const Params& p) {
  const int n = p.n, d = p.d;
  std::vector<Word> monos;
  for (Word m = 0; m < (Word{1} << n); ++m)
    if (popcount(m) <= d) monos.push_back(m);
  if (monos.size() > 20) throw UsageError("half-vanishing: too many monomials to enumerate");
  std::vector<std::vector<std::uint8_t>> tables;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << monos.size()); ++mask) {
    std::vector<Word> sel;
    for (std::size_t i = 0; i < monos.size(); ++i)
      if ((mask >> i) & 1u) sel.push_back(monos[i]);
    tables.push_back(truth_table(MultilinearPoly(n, d, sel)));
  }
  Report r;
  Rng root(p.seed);
  bool ok = true;
  for (int t = 0; t < p.trials; ++t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(n, n / 2, rng);
    const auto elems = a.elements();
    std::vector<const std::vector<std::uint8_t>*> ideal;
    for (const auto& tb : tables)
      if (std::all_of(elems.begin(), elems.end(), [&](Word x) { return tb[x] == 0; })) ideal.push_back(&tb);
    int worst = 0;
    for (Word v = 0; v < (Word{1} << n); ++v) {
      if (a.contains_word(v)) continue;
      long long vanish = 0;
      for (const auto* tb : ideal) vanish += (*tb)[v] == 0;
      worst = std::max<int>(worst, static_cast<int>(std::llabs(2 * vanish - static_cast<long long>(ideal.size()))));
    }
    ok = ok && worst == 0;
    Json j = record("half-vanishing", t);
    j["ideal_size"] = ideal.size();
    j["max_deviation_from_half"] = worst;
    r.records.push_back(std::move(j));
  }
  r.passed = ok;
  r.summary = {{"n d", std::to_string(n) + " " + std::to_string(d)},
               {"polynomials enumerated", std::to_string(tables.size())},
               {"exactly half vanish off A", ok ? "yes" : "no"}};
  return r;
}

Report degree1(const Params& p) {
  ExplicitParams e = explicit_params(p);
  e.d = 1;
  e.allow_low_degree = true;
  e.validate();
  Rng root(p.seed);
  auto outs = parallel_trials<int>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    const Subspace a = random_subspace(e.n, e.n / 2, rng);
    const ExplicitNote note = bank_explicit(e, a, rng);
    const Degree1Result res = degree1_attack(note.s_a, note.s_aperp);
    return res.status == AttackStatus::kRecovered && res.recovered == a ? 1 : 0;
  });
  Report r;
  int ok = 0;
  for (int t = 0; t < p.trials; ++t) {
    ok += outs[t];
    Json j = record("degree1-attack", t);
    j["recovered"] = outs[t] == 1;
    r.records.push_back(std::move(j));
  }
  const double rate = static_cast<double>(ok) / p.trials;
  r.passed = rate >= 0.99;
  r.summary = {{"n eps beta", std::to_string(e.n) + " " + fmt(e.eps, 3) + " " + fmt(e.beta, 1)},
               {"recovery rate", fmt(rate, 3) + " (" + frac(ok, p.trials) + ")"}};
  return r;
}

Report wiesner_clone(const Params& p) {
  Report r;
  const CloningIsometry naive = measure_and_resend();
  Rng rng(p.seed);
  const ClonerSearchResult opt = optimize_cloner(std::max(20, p.k), rng);
  NaiveBank bank;
  int naive_pass = 0, opt_pass = 0;
  for (int t = 0; t < p.trials; ++t) {
    Rng tr = rng.split(t);
    const WiesnerNote note = bank.mint(p.n, tr);
    naive_pass += clone_and_verify(bank, note, naive, tr);
    opt_pass += clone_and_verify(bank, note, opt.best, tr);
  }
  const double naive_rate = static_cast<double>(naive_pass) / p.trials;
  const double opt_rate = static_cast<double>(opt_pass) / p.trials;
  r.records.push_back(Json{{"experiment", "wiesner-clone"}, {"naive_per_qubit", naive.average_success()},
                           {"optimized_per_qubit", opt.success}, {"restarts", opt.restarts}, {"n", p.n},
                           {"naive_rate", naive_rate}, {"optimized_rate", opt_rate}});
  r.passed = std::abs(naive.average_success() - 0.625) < 1e-12 && std::abs(opt.success - 0.75) <= 0.01;
  r.summary = {{"measure-and-resend per qubit", fmt(naive.average_success(), 6)},
               {"optimized per qubit", fmt(opt.success, 6)},
               {"n-qubit naive rate vs (5/8)^n", fmt(naive_rate, 4) + " vs " + fmt(std::pow(0.625, p.n), 4)},
               {"n-qubit optimized rate vs p^n", fmt(opt_rate, 4) + " vs " + fmt(std::pow(opt.success, p.n), 4)}};
  return r;
}

Report wiesner_adaptive(const Params& p) {
  const int samples = p.k > 0 ? p.k : default_samples_per_candidate(p.n);
  Rng root(p.seed);
  struct Out {
    bool recovered = false, forged_ok = false;
    std::uint64_t queries = 0;
  };
  auto outs = parallel_trials<Out>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    NaiveBank bank;
    const WiesnerNote note = bank.mint(p.n, rng);
    const AdaptiveResult a = adaptive_attack(bank, note, samples, rng);
    Out o;
    o.recovered = a.recovered == bank.record(note.serial);
    o.queries = a.queries;
    std::vector<Qubit> forged;
    for (Bb84 b : a.recovered) forged.push_back(bb84_state(b));
    o.forged_ok = bank.verify(note.serial, forged, rng);
    return o;
  });
  Report r;
  int rec = 0, forged = 0;
  double q = 0.0;
  for (int t = 0; t < p.trials; ++t) {
    rec += outs[t].recovered;
    forged += outs[t].forged_ok;
    q += static_cast<double>(outs[t].queries) / p.trials;
    Json j = record("wiesner-adaptive", t);
    j["recovered"] = outs[t].recovered;
    j["forgery_verified"] = outs[t].forged_ok;
    j["queries"] = outs[t].queries;
    r.records.push_back(std::move(j));
  }
  const double rate = static_cast<double>(rec) / p.trials;
  r.passed = rate >= 0.9;
  r.summary = {{"n, samples per candidate", std::to_string(p.n) + ", " + std::to_string(samples)},
               {"success-rate", fmt(rate, 3)},
               {"forged notes verified", frac(forged, p.trials)},
               {"mean queries / (n log2 n)", fmt(q / (p.n * std::log2(std::max(2, p.n))), 2)}};
  return r;
}

Report keyed_contrast(const Params& p) {
  const int samples = p.k > 0 ? p.k : 24;
  Rng root(p.seed);
  Rng krng = root.split(0x6b6579);
  const KeyedSubspaceBank bank = KeyedSubspaceBank::random(p.n, krng);
  Report r;
  int honest = 0;
  std::vector<std::array<double, 4>> rates;
  std::uint64_t queries = 0;
  for (int t = 0; t < p.trials; ++t) {
    Rng rng = root.split(t);
    const std::uint64_t serial = bank.mint_serial(rng);
    StateVector s = bank.note(serial);
    bool all = true;
    for (int rep = 0; rep < 3; ++rep) all = bank.verify(serial, s, rng) && all;
    honest += all;
    const KeyedAttackResult a = keyed_transplanted_attack(bank, serial, samples, rng, 0);
    rates.insert(rates.end(), a.pass_rates.begin(), a.pass_rates.end());
    queries += a.queries;
    Json j = record("keyed-contrast", t);
    j["honest_accepts_repeated"] = all;
    j["mean_spread"] = a.mean_spread;
    r.records.push_back(std::move(j));
  }
  Rng srng = root.split(0x7370);
  const SpreadStatistic st = spread_statistic(rates, samples, srng, 4000);
  const bool no_signal = st.observed <= st.null_mean + 3.0 * st.null_sd;
  r.passed = honest == p.trials && no_signal;
  r.summary = {{"n, notes, samples", std::to_string(p.n) + ", " + std::to_string(p.trials) + ", " + std::to_string(samples)},
               {"honest notes accepted (3 verifications)", frac(honest, p.trials)},
               {"mean spread (observed)", fmt(st.observed, 4)},
               {"mean spread (null)", fmt(st.null_mean, 4) + " +- " + fmt(st.null_sd, 4)},
               {"verifier queries", std::to_string(queries)}};
  return r;
}

Report completeness_amplification(const Params& p) {
  Rng root(p.seed);
  Rng brng = root.split(0xb0b);
  auto inner = std::make_shared<HsMiniScheme>(make_bundle(p.n, brng));
  auto base = std::make_shared<NoisyVerifierScheme>(inner, p.eps);
  const auto comp = amplify_completeness(base, p.k, p.eta);
  auto rejects = parallel_trials<int>(p.trials, p.workers, [&](int t) {
    Rng rng = root.split(t);
    CompositeNote note = comp->bank(rng);
    return comp->verify(note.serials, note.states, rng) ? 0 : 1;
  });
  int rej = 0;
  for (int x : rejects) rej += x;
  const double err = static_cast<double>(rej) / p.trials;

  // Junk in 2k/15 slots puts the forger near the threshold: about half its forgeries pass at k = 60.
  const int junk = std::max(1, static_cast<int>(std::lround(p.k * 2.0 / 15.0)));
  const int red_trials = std::max(200, p.trials / 5);
  struct Out {
    int composite = 0, reduced = 0;
  };
  auto outs = parallel_trials<Out>(red_trials, p.workers, [&](int t) {
    Rng rng = root.split(1'000'000 + t);
    ScriptedCompositeCounterfeiter forger(inner, junk);  // reads targets from the projective inner scheme
    Out o;
    CompositeNote note = comp->bank(rng);
    CompositeForgery f = forger.counterfeit(note, rng);
    o.composite = comp->verify2(note.serials, f.first, f.second, rng);
    const Banknote target = base->bank(rng);
    auto [a, b] = reduce_composite_counterfeiter(*comp, forger, target, rng);
    o.reduced = verify2(*base, target.serial, a, b, rng);
    return o;
  });
  int comp_ok = 0, red_ok = 0;
  for (const auto& o : outs) {
    comp_ok += o.composite;
    red_ok += o.reduced;
  }
  const double dprime = static_cast<double>(comp_ok) / red_trials;
  const double rrate = static_cast<double>(red_ok) / red_trials;
  const double target = (1.0 - 2.0 * p.eps - 2.0 * p.eta) * dprime;
  const double sigma = std::sqrt(std::max(rrate * (1 - rrate), 1e-12) / red_trials) +
                       (1.0 - 2.0 * p.eps - 2.0 * p.eta) * std::sqrt(std::max(dprime * (1 - dprime), 1e-12) / red_trials);
  const bool reduction_ok = rrate >= target - 3.0 * sigma;
  Report r;
  r.records.push_back(Json{{"experiment", "completeness-amplification"}, {"k", p.k}, {"eps", p.eps},
                           {"eta", p.eta}, {"threshold", comp->threshold()}, {"completeness_error", err},
                           {"junk_slots", junk}, {"composite_forgery_rate", dprime}, {"reduction_rate", rrate}});
  r.passed = err <= 0.01 && reduction_ok;
  r.summary = {{"k, eps, eta, threshold", std::to_string(p.k) + ", " + fmt(p.eps, 2) + ", " + fmt(p.eta, 2) + ", " +
                                              std::to_string(comp->threshold())},
               {"composite completeness error", fmt(err, 4) + " (" + frac(rej, p.trials) + ", target <= 0.01)"},
               {"composite forgery rate d'", fmt(dprime, 4)},
               {"reduction rate vs (1-2e-2h)d'", fmt(rrate, 4) + " vs " + fmt(target, 4)}};
  return r;
}

Report money_end_to_end(const Params& p) {
  Rng root(p.seed);
  Rng brng = root.split(0xb0b);
  auto mini = std::make_shared<HsMiniScheme>(make_bundle(p.n, brng));
  int height = 1;
  while ((1 << height) < p.trials) ++height;
  auto sigs = std::make_shared<MerkleLamport>(height);
  const auto money = standard_construction(mini, sigs);
  Rng krng = root.split(0x6b);
  const MoneyKeys keys = money->keygen(krng);
  std::vector<MoneyNote> notes;
  for (int t = 0; t < p.trials; ++t) {
    Rng rng = root.split(t);
    notes.push_back(money->bank(keys, rng));
  }
  int honest = 0, serial_rej = 0, junk_rej = 0;
  for (int t = 0; t < p.trials; ++t) {
    Rng rng = root.split(0x10000 + t);
    MoneyNote n = notes[t];
    honest += money->verify(keys.public_key, n, rng);
    MoneyNote altered = notes[t];
    altered.serial[rng.below(altered.serial.size())] ^= static_cast<std::uint8_t>(1u << rng.below(8));
    serial_rej += !money->verify(keys.public_key, altered, rng);
    MoneyNote junk = notes[t];
    const auto target = mini->projective_target(junk.serial);
    std::size_t x = rng.below(junk.state.dim());
    while (std::abs((*target)[x]) > 1e-12) x = rng.below(junk.state.dim());
    junk.state = StateVector::basis(junk.state.qubits(), x);
    junk_rej += !money->verify(keys.public_key, junk, rng);
  }
  Report r;
  r.records.push_back(Json{{"experiment", "money-end-to-end"}, {"notes", p.trials}, {"honest_accepts", honest},
                           {"altered_serial_rejects", serial_rej}, {"junk_state_rejects", junk_rej}});
  r.passed = honest == p.trials && serial_rej == p.trials && junk_rej == p.trials;
  r.summary = {{"honest notes accepted", frac(honest, p.trials)},
               {"altered-serial forgeries rejected", frac(serial_rej, p.trials)},
               {"junk-state forgeries rejected", frac(junk_rej, p.trials)}};
  return r;
}

struct QubitCap {
  int max_n;
  bool even;
};

// Largest n each experiment can simulate, and whether it runs on a hidden-subspace bundle.
QubitCap cap_for(const std::string& id) {
  const int sim = simulator_qubit_cap();
  if (id == "verifier-projector") return {std::min(sim, 10), false};
  if (id == "amplify-counterfeiter" || id == "amplify-calibration") return {sim / 2, true};
  if (id == "innerprod-progress" || id == "keyed-contrast") return {sim - 1, id == "innerprod-progress"};
  if (id == "half-vanishing") return {6, false};
  if (id == "explicit-mint-verify" || id == "degree1-attack") return {std::min(sim, 16), true};
  if (id == "wiesner-clone" || id == "wiesner-adaptive") return {64, false};
  if (id == "kcopy") return {60, false};
  if (id == "completeness-amplification" || id == "money-end-to-end") return {std::min(sim, 20), true};
  return {sim, false};
}

Params make_defaults(int n, int trials, double eps = 0.0, double delta = 0.0, int d = 0, double beta = 0.0,
                     int k = 0, double eta = 0.0) {
  Params p;
  p.n = n;
  p.trials = trials;
  p.eps = eps;
  p.delta = delta;
  p.d = d;
  p.beta = beta;
  p.k = k;
  p.eta = eta;
  return p;
}

}  // namespace

Json Params::to_json() const {
  return Json{{"n", n},   {"d", d},         {"eps", eps},       {"beta", beta}, {"delta", delta},
              {"k", k},   {"eta", eta},     {"trials", trials}, {"seed", seed}};
}

const std::vector<ExperimentInfo>& catalog() {
  static const std::vector<ExperimentInfo> entries = {
      {"verifier-projector", "Lemma \"testworks\"", "four-step verifier circuit equals |A><A| entrywise",
       make_defaults(8, 50), verifier_projector},
      {"duality", "hidden-subspace mini-scheme", "H^n |A> = |A^perp>", make_defaults(12, 1000),
       duality},
      {"hybrid-search-budget", "Theorem \"combined\"", "hybrid search queries and infidelity on planted instances",
       make_defaults(10, 200, 0.05, 0.1), hybrid_budget},
      {"hybrid-calibration", "Theorem \"combined\"", "sweep for the hybrid search constant K",
       make_defaults(10, 200), hybrid_calibration},
      {"fixed-point-monotone", "Lemma \"fixedpoint\"", "expected fidelity against rounds",
       make_defaults(8, 500, 0.1, 0.1), fixed_point_monotone},
      {"fixed-point-calibration", "Lemma \"fixedpoint\"", "sweep for the fixed-point constant c",
       make_defaults(8, 300), fixed_point_calibration},
      {"amplify-counterfeiter", "Theorem \"miniamp\"", "amplify a planted partial cloner (eps = its pass rate)",
       make_defaults(8, 200, 0.2, 0.05), amplify},
      {"amplify-calibration", "Theorem \"miniamp\"", "sweep for the amplification constant K",
       make_defaults(8, 200, 0.2, 0.05), amplify_calibration},
      {"innerprod-progress", "Lemma \"innerprod\"", "per-query progress drop for the probe suite (k = queries)",
       make_defaults(16, 20, 0.0, 0.0, 0, 0.0, 12), innerprod_progress},
      {"clone-tightness", "cloning experiments (tightness)", "amplitude amplification cloning cost",
       make_defaults(8, 200), clone_tightness},
      {"kcopy", "cloning experiments (k-copy variant)", "search cost of one more copy given k copies",
       make_defaults(6, 400), kcopy},
      {"explicit-mint-verify", "explicit mini-scheme E; Lemma \"noisyunique\"", "honest mint/verify and Z-set uniqueness",
       make_defaults(12, 500, 0.25, 0.0, 4, 12.0), explicit_mint_verify},
      {"half-vanishing", "Lemma \"unique\"", "exhaustive half-vanishing check", make_defaults(4, 20, 0.0, 0.0, 2),
       half_vanishing},
      {"degree1-attack", "degree-1 attack claim", "recover A from degree-1 systems",
       make_defaults(12, 200, 0.1, 0.0, 1, 6.0), degree1},
      {"wiesner-clone", "Wiesner scheme", "measure-and-resend versus optimized single-qubit cloning",
       make_defaults(4, 20000, 0.0, 0.0, 0, 0.0, 20), wiesner_clone},
      {"wiesner-adaptive", "Wiesner scheme, adaptive attack", "swap-out attack (k = samples per candidate, 0 = default)",
       make_defaults(16, 100), wiesner_adaptive},
      {"keyed-contrast", "Theorem \"wiesnerfix\"", "swap-out attack transplanted to the keyed subspace scheme",
       make_defaults(16, 8, 0.0, 0.0, 0, 0.0, 24), keyed_contrast},
      {"completeness-amplification", "Theorem \"ampcomp\"", "repetition scheme over a noisy base verifier",
       make_defaults(4, 10000, 0.2, 0.0, 0, 0.0, 60, 0.1), completeness_amplification},
      {"money-end-to-end", "Theorem \"compose\"", "standard construction over the hidden-subspace mini-scheme",
       make_defaults(8, 1000), money_end_to_end},
  };
  return entries;
}

const ExperimentInfo* find_experiment(const std::string& id) {
  for (const auto& e : catalog())
    if (e.id == id) return &e;
  return nullptr;
}

Params resolve(const ExperimentInfo& info, const Config& cfg) {
  Params p = info.defaults;
  if (cfg.n) p.n = *cfg.n;
  if (cfg.d) p.d = *cfg.d;
  if (cfg.eps) p.eps = *cfg.eps;
  if (cfg.beta) p.beta = *cfg.beta;
  if (cfg.delta) p.delta = *cfg.delta;
  if (cfg.k) p.k = *cfg.k;
  if (cfg.eta) p.eta = *cfg.eta;
  if (cfg.trials) p.trials = *cfg.trials;
  p.seed = cfg.seed;
  p.workers = cfg.workers;
  const QubitCap cap = cap_for(info.id);
  if (p.n < 2 || p.n > cap.max_n) throw UsageError("n must lie in [2, " + std::to_string(cap.max_n) + "] for " + info.id);
  if (cap.even && p.n % 2) throw UsageError("n must be even for " + info.id);
  if (p.trials < 1 || p.trials > 10'000'000) throw UsageError("trials must lie in [1, 1e7]");
  if (p.eps < 0.0 || p.eps >= 1.0) throw UsageError("eps must lie in [0, 1)");
  if (p.delta < 0.0 || p.delta >= 1.0) throw UsageError("delta must lie in [0, 1)");
  if (p.d < 0 || p.beta < 0.0 || p.k < 0 || p.eta < 0.0) throw UsageError("parameters must be nonnegative");
  if (p.workers < 0) throw UsageError("workers must be nonnegative");
  return p;
}

Report run_experiment(const Config& cfg) {
  const ExperimentInfo* info = find_experiment(cfg.experiment);
  if (!info) throw UsageError("unknown experiment '" + cfg.experiment + "'");
  const Params p = resolve(*info, cfg);
  Report r;
  try {
    r = info->run(p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::length_error& e) {
    throw UsageError(e.what());
  }
  r.records.push_back(summary_record(info->id, p, r.passed));
  return r;
}

std::string render_summary(const std::string& id, const Report& r) {
  std::size_t w = 0;
  for (const auto& [k, v] : r.summary) w = std::max(w, k.size());
  std::ostringstream out;
  out << id << '\n';
  for (const auto& [k, v] : r.summary) out << "  " << k << std::string(w - k.size() + 2, ' ') << v << '\n';
  out << "  " << "result" << std::string(w > 6 ? w - 6 + 2 : 2, ' ') << (r.passed ? "PASS" : "FAIL") << '\n';
  return out.str();
}

}  // namespace hsm::cli
