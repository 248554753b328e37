#include "hsmoney/cli/app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hsmoney/cli/experiments.hpp"
#include "hsmoney/hsmini.hpp"
#include "hsmoney/money.hpp"
#include "hsmoney/polyhide.hpp"
#include "hsmoney/privkey.hpp"
#include "hsmoney/signature.hpp"

namespace hsm::cli {

namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  if (!o || !(o << text)) throw IoError("cannot write " + p.string());
}

struct Options {
  Config cfg;
  std::string out_path;
  std::string dir;
  std::string scheme = "hsmini";
  bool allow_low_degree = false;
  bool json = false;
};

// Writes the records as JSON lines (to --out when given, else ahead of the summary) and the table.
int emit(const std::string& id, const Report& r, const Options& o, std::ostream& out) {
  std::string lines;
  for (const auto& rec : r.records) lines += rec.dump() + '\n';
  if (o.out_path.empty()) out << lines;
  else write_file(o.out_path, lines);
  out << render_summary(id, r);
  return r.passed ? kExitOk : kExitFailed;
}

int run_named(const std::string& id, Options o, std::ostream& out) {
  o.cfg.experiment = id;
  return emit(id, run_experiment(o.cfg), o, out);
}

int cmd_catalog(const Options& o, std::ostream& out) {
  for (const auto& e : catalog()) {
    if (o.json) {
      out << Json{{"id", e.id}, {"anchor", e.anchor}, {"description", e.description},
                  {"defaults", e.defaults.to_json()}}
                 .dump()
          << '\n';
    } else {
      out << e.id << "  [" << e.anchor << "]  " << e.description << "  (n=" << e.defaults.n
          << ", trials=" << e.defaults.trials << ")\n";
    }
  }
  return kExitOk;
}

ExplicitParams explicit_from(const Options& o) {
  ExplicitParams e;
  if (o.cfg.n) e.n = *o.cfg.n;
  if (o.cfg.d) e.d = *o.cfg.d;
  if (o.cfg.eps) e.eps = *o.cfg.eps;
  if (o.cfg.beta) e.beta = *o.cfg.beta;
  e.allow_low_degree = o.allow_low_degree;
  try {
    e.validate();
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  return e;
}

int cmd_verify_roundtrip(const Options& o, std::ostream& out) {
  const std::string& scheme = o.scheme;
  const int trials = o.cfg.trials.value_or(100);
  if (trials < 1) throw UsageError("trials must be positive");
  const Rng root(o.cfg.seed);
  std::vector<int> accepted;

  if (scheme == "hsmini" || scheme == "explicit") {
    std::shared_ptr<MiniScheme> mini;
    if (scheme == "hsmini") {
      const int n = o.cfg.n.value_or(10);
      if (n < 2 || n > 20 || n % 2) throw UsageError("hsmini needs even n in [2, 20]");
      Rng brng = root.split(0xb0b);
      mini = std::make_shared<HsMiniScheme>(make_bundle(n, brng));
    } else {
      mini = std::make_shared<ExplicitMiniScheme>(explicit_from(o));
    }
    accepted = parallel_trials<int>(trials, o.cfg.workers, [&](int t) {
      Rng rng = root.split(t);
      Banknote note = mini->bank(rng);
      return mini->verify(note.serial, note.state, rng) ? 1 : 0;
    });
  } else if (scheme == "keyed") {
    const int n = o.cfg.n.value_or(10);
    if (n < 2 || n > simulator_qubit_cap()) throw UsageError("keyed n out of range");
    Rng krng = root.split(0x6b);
    const KeyedSubspaceBank keyed = KeyedSubspaceBank::random(n, krng);
    accepted = parallel_trials<int>(trials, o.cfg.workers, [&](int t) {
      Rng rng = root.split(t);
      const std::uint64_t serial = keyed.mint_serial(rng);
      StateVector s = keyed.note(serial);
      return keyed.verify(serial, s, rng) ? 1 : 0;
    });
  } else if (scheme == "wiesner") {
    const int n = o.cfg.n.value_or(16);
    if (n < 1 || n > 64) throw UsageError("wiesner n must lie in [1, 64]");
    NaiveBank bank;
    for (int t = 0; t < trials; ++t) {
      Rng rng = root.split(t);
      WiesnerNote note = wiesner_bank(bank, n, rng);
      accepted.push_back(wiesner_verify(bank, note.serial, note.qubits, rng) ? 1 : 0);
    }
  } else if (scheme == "money") {
    const int n = o.cfg.n.value_or(8);
    if (n < 2 || n > 20 || n % 2) throw UsageError("money needs even n in [2, 20]");
    int height = 1;
    while ((1 << height) < trials) ++height;
    if (height > 16) throw UsageError("money roundtrip supports at most 65536 notes");
    Rng brng = root.split(0xb0b);
    const auto money = standard_construction(std::make_shared<HsMiniScheme>(make_bundle(n, brng)),
                                             std::make_shared<MerkleLamport>(height));
    Rng krng = root.split(0x6b);
    const MoneyKeys keys = money->keygen(krng);
    // Sequential: the signer hands out one-time leaves in order.
    for (int t = 0; t < trials; ++t) {
      Rng rng = root.split(t);
      const MoneyNote note = money->bank(keys, rng);
      accepted.push_back(money->verify(keys.public_key, note, rng) ? 1 : 0);
    }
  } else {
    throw UsageError("unknown scheme '" + scheme + "' (hsmini, explicit, money, wiesner, keyed)");
  }

  Report r;
  int acc = 0;
  for (int t = 0; t < trials; ++t) {
    acc += accepted[t];
    r.records.push_back(Json{{"experiment", "verify-roundtrip"}, {"scheme", scheme}, {"trial", t},
                             {"accepted", accepted[t] == 1}});
  }
  r.passed = acc == trials;
  r.summary = {{"scheme", scheme}, {"accepts", std::to_string(acc) + "/" + std::to_string(trials)}};
  return emit("verify-roundtrip", r, o, out);
}

fs::path require_dir(const Options& o) {
  if (o.dir.empty()) throw UsageError("--dir is required");
  return o.dir;
}

int cmd_mint(const Options& o, std::ostream& out) {
  const fs::path dir = require_dir(o);
  Rng rng(o.cfg.seed);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  if (o.scheme == "explicit") {
    const ExplicitParams e = explicit_from(o);
    const ExplicitNote note = bank_explicit(e, rng);
    write_file(dir / "s_a.txt", note.s_a.to_text());
    write_file(dir / "s_aperp.txt", note.s_aperp.to_text());
    write_file(dir / "state.txt", note.state.dump());
    write_file(dir / "note.json",
               Json{{"scheme", "explicit"}, {"n", e.n}, {"d", e.d}, {"eps", e.eps}, {"beta", e.beta},
                    {"allow_low_degree", e.allow_low_degree}}
                       .dump(2));
  } else if (o.scheme == "hsmini") {
    const int n = o.cfg.n.value_or(10);
    if (n < 2 || n > 20 || n % 2) throw UsageError("hsmini needs even n in [2, 20]");
    Rng brng = rng.split(0xb0b);
    const auto bundle = make_bundle(n, brng);
    const HsBanknote note = bank(*bundle, rng);
    write_file(dir / "bundle.json", bundle->snapshot_json());
    write_file(dir / "state.txt", note.state.dump());
    write_file(dir / "note.json",
               Json{{"scheme", "hsmini"}, {"n", n}, {"serial", to_hex(bundle->encode_serial(note.serial))}}.dump(2));
  } else {
    throw UsageError("mint supports --scheme explicit or hsmini");
  }
  out << "minted " << o.scheme << " note in " << dir.string() << '\n';
  return kExitOk;
}

Json read_json(const fs::path& p) {
  try {
    return Json::parse(read_file(p));
  } catch (const Json::parse_error& e) {
    throw IoError(p.string() + ": " + e.what());
  }
}

int cmd_verify(const Options& o, std::ostream& out) {
  const fs::path dir = require_dir(o);
  const Json meta = read_json(dir / "note.json");
  const std::string scheme = meta.value("scheme", "");
  Rng rng(o.cfg.seed);
  StateVector s = StateVector::from_dump(read_file(dir / "state.txt"));
  bool ok = false;
  if (scheme == "explicit") {
    ExplicitParams e;
    e.n = meta.at("n");
    e.d = meta.at("d");
    e.eps = meta.at("eps");
    e.beta = meta.at("beta");
    e.allow_low_degree = meta.value("allow_low_degree", false) || o.allow_low_degree;
    try {
      e.validate();
    } catch (const std::invalid_argument& ex) {
      throw UsageError(ex.what());
    }
    const PolySystem sa = PolySystem::from_text(read_file(dir / "s_a.txt"));
    const PolySystem sp = PolySystem::from_text(read_file(dir / "s_aperp.txt"));
    ok = verify_explicit(e, sa, sp, s, Register::whole(s.qubits()), rng);
  } else if (scheme == "hsmini") {
    const auto bundle = OracleBundle::from_snapshot(read_file(dir / "bundle.json"));
    const std::uint64_t serial = bundle->decode_serial(from_hex(meta.at("serial").get<std::string>()));
    ok = verify(*bundle, serial, s, rng);
  } else {
    throw UsageError("note.json names unknown scheme '" + scheme + "'");
  }
  out << (ok ? "accept" : "reject") << '\n';
  return ok ? kExitOk : kExitFailed;
}

int cmd_attack_d1(const Options& o, std::ostream& out) {
  if (o.dir.empty()) return run_named("degree1-attack", o, out);
  const fs::path dir = o.dir;
  const PolySystem sa = PolySystem::from_text(read_file(dir / "s_a.txt"));
  const PolySystem sp = PolySystem::from_text(read_file(dir / "s_aperp.txt"));
  const Degree1Result res = degree1_attack(sa, sp);
  Json j{{"experiment", "degree1-attack"}, {"accepted_primal", res.accepted_primal},
         {"accepted_dual", res.accepted_dual}};
  switch (res.status) {
    case AttackStatus::kRecovered:
      j["status"] = "recovered";
      j["subspace"] = res.recovered.to_text();
      break;
    case AttackStatus::kInsufficient:
      j["status"] = "insufficient";
      break;
    case AttackStatus::kInconsistent:
      j["status"] = "inconsistent";
      break;
  }
  const std::string line = j.dump() + '\n';
  if (o.out_path.empty()) out << line;
  else write_file(o.out_path, line);
  return res.status == AttackStatus::kRecovered ? kExitOk : kExitFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hsmoney: hidden-subspace quantum money simulator and experiment runner"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML or INI file with flag values; command-line flags win");

  Options o;
  std::int64_t seed = 1;
  int n = 0, d = 0, k = 0, trials = 0;
  double eps = 0, beta = 0, delta = 0, eta = 0;
  auto* on = app.add_option("--n", n, "number of qubits / ambient dimension");
  auto* od = app.add_option("--d", d, "polynomial degree");
  auto* oeps = app.add_option("--eps", eps, "noise rate or overlap parameter");
  auto* obeta = app.add_option("--beta", beta, "system size factor (m = ceil(beta n))");
  auto* odelta = app.add_option("--delta", delta, "target error");
  auto* ok = app.add_option("--k", k, "repetitions, copies, queries or samples (per experiment)");
  auto* oeta = app.add_option("--eta", eta, "threshold slack");
  auto* otrials = app.add_option("--trials", trials, "number of trials");
  app.add_option("--seed", seed, "root seed")->capture_default_str();
  app.add_option("--out", o.out_path, "write JSON-lines records here instead of stdout");
  app.add_option("--workers", o.cfg.workers, "worker threads (0 = available parallelism)")->check(CLI::NonNegativeNumber);

  std::string run_id;
  auto* c_catalog = app.add_subcommand("catalog", "list experiments with anchors and defaults");
  c_catalog->add_flag("--json", o.json, "one JSON object per line");
  auto* c_run = app.add_subcommand("run", "run an experiment from the catalog");
  c_run->add_option("id", run_id, "experiment id")->required();
  auto* c_rt = app.add_subcommand("verify-roundtrip", "mint and verify notes in process");
  c_rt->add_option("--scheme", o.scheme, "hsmini | explicit | money | wiesner | keyed");
  c_rt->add_flag("--allow-low-degree", o.allow_low_degree, "permit d < 4 for the explicit scheme");
  auto* c_adapt = app.add_subcommand("attack-adaptive", "swap-out attack on Wiesner notes");
  auto* c_clone = app.add_subcommand("attack-clone", "single-qubit cloning attack on Wiesner notes");
  auto* c_keyed = app.add_subcommand("attack-keyed", "swap-out attack transplanted to keyed subspace notes");
  auto* c_d1 = app.add_subcommand("attack-d1", "degree-1 attack on an explicit note (--dir) or as an experiment");
  c_d1->add_option("--dir", o.dir, "directory written by mint --scheme explicit");
  auto* c_mint = app.add_subcommand("mint", "mint one note into a directory");
  c_mint->add_option("--scheme", o.scheme, "explicit | hsmini");
  c_mint->add_option("--dir", o.dir, "output directory")->required();
  c_mint->add_flag("--allow-low-degree", o.allow_low_degree, "permit d < 4 (insecure)");
  auto* c_verify = app.add_subcommand("verify", "verify a note directory written by mint");
  c_verify->add_option("--dir", o.dir, "note directory")->required();
  c_verify->add_flag("--allow-low-degree", o.allow_low_degree, "permit d < 4 (insecure)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (seed < 0) {
    err << "usage error: --seed must be nonnegative\n";
    return kExitUsage;
  }
  o.cfg.seed = static_cast<std::uint64_t>(seed);
  if (*on) o.cfg.n = n;
  if (*od) o.cfg.d = d;
  if (*oeps) o.cfg.eps = eps;
  if (*obeta) o.cfg.beta = beta;
  if (*odelta) o.cfg.delta = delta;
  if (*ok) o.cfg.k = k;
  if (*oeta) o.cfg.eta = eta;
  if (*otrials) o.cfg.trials = trials;

  try {
    if (*c_catalog) return cmd_catalog(o, out);
    if (*c_run) return run_named(run_id, o, out);
    if (*c_rt) return cmd_verify_roundtrip(o, out);
    if (*c_adapt) return run_named("wiesner-adaptive", o, out);
    if (*c_clone) return run_named("wiesner-clone", o, out);
    if (*c_keyed) return run_named("keyed-contrast", o, out);
    if (*c_d1) return cmd_attack_d1(o, out);
    if (*c_mint) return cmd_mint(o, out);
    if (*c_verify) return cmd_verify(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::length_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace hsm::cli
