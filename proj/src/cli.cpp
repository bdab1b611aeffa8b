#include "sqpbs/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>

#include "sqpbs/analysis.hpp"
#include "sqpbs/errors.hpp"
#include "sqpbs/protocol.hpp"

namespace sqpbs::cli {
namespace {

struct RunFlags {
  std::size_t n = 8;
  std::optional<std::uint64_t> seed;
  std::size_t decoys = 0;
  double threshold = 0.0;
  std::string attack = "none";
  std::string channel = "xi_m";
  std::string eve_params;
  std::string forgery = "outside-random-md";
  std::size_t hash_bits = 256;
  std::string key_mode = "simulated";
  std::vector<std::size_t> tamper;
  std::string withhold;
  std::string out;
};

void add_run_flags(CLI::App& app, RunFlags& f) {
  app.add_option("--n", f.n, "message length")->capture_default_str();
  app.add_option("--seed", f.seed, std::string("run seed (default: $") + kSeedEnv + " or 0)");
  app.add_option("--decoys", f.decoys, "decoys per quantum transmission (0 = n)")->capture_default_str();
  app.add_option("--threshold", f.threshold, "tolerated decoy error rate")->capture_default_str();
  app.add_option("--attack", f.attack, "none, intercept-resend, entangle-measure, forge-md")->capture_default_str();
  app.add_option("--channel", f.channel, "attacked channel: W1, W2, W4, xi_m, G'")->capture_default_str();
  app.add_option("--eve-params", f.eve_params, "JSON file with Eve's alpha and eps");
  app.add_option("--forgery", f.forgery, "outside-random-md or inside-no-key")->capture_default_str();
  app.add_option("--hash-bits", f.hash_bits, "hash output length l")->capture_default_str();
  app.add_option("--key-mode", f.key_mode, "simulated or stubbed")->capture_default_str();
  app.add_option("--tamper-md-bit", f.tamper, "flip this bit of E_KDT(M_D) in transit (repeatable)");
  app.add_option("--withhold", f.withhold, "Bob, David or Charlie never sends its record");
  app.add_option("--out", f.out, "output JSON path");
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

Json with_header(Json body) {
  Json j;
  j["tool"] = "sqpbs";
  j["tool_version"] = SQPBS_VERSION;
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

void resolve_seed(const std::optional<std::uint64_t>& flag, RunConfig& cfg) {
  if (flag) {
    cfg.seed = *flag;
    cfg.seed_source = "flag";
    return;
  }
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string(kSeedEnv) + " is not an unsigned integer");
    cfg.seed = v;
    cfg.seed_source = std::string("env:") + kSeedEnv;
    return;
  }
  cfg.seed = 0;
  cfg.seed_source = "default";
}

RunConfig build_config(const RunFlags& f) {
  RunConfig cfg;
  cfg.n = f.n;
  resolve_seed(f.seed, cfg);
  cfg.decoys = f.decoys;
  cfg.threshold = f.threshold;
  cfg.attack.kind = parse_attack(f.attack);
  cfg.attack.channel = parse_channel(f.channel);
  if (!f.eve_params.empty()) cfg.attack.eve = eve_params_from_json(read_json(f.eve_params));
  cfg.attack.forgery = parse_forgery(f.forgery);
  cfg.attack.tamper_md_bits = f.tamper;
  if (!f.withhold.empty()) {
    if (f.withhold == "Bob") cfg.attack.withhold = Party::Bob;
    else if (f.withhold == "David") cfg.attack.withhold = Party::David;
    else if (f.withhold == "Charlie") cfg.attack.withhold = Party::Charlie;
    else throw ConfigError("--withhold takes Bob, David or Charlie");
  }
  cfg.hash.output_bits = f.hash_bits;
  if (f.key_mode != "simulated" && f.key_mode != "stubbed") throw ConfigError("--key-mode takes simulated or stubbed");
  cfg.key_mode = f.key_mode == "simulated" ? KeyMode::Simulated : KeyMode::Stubbed;
  cfg.validate();
  return cfg;
}

int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::Valid: return kValid;
    case Verdict::Invalid: return kInvalid;
    case Verdict::Aborted: return kAborted;
  }
  return kFailure;
}

int cmd_run(const RunFlags& flags, std::ostream& out) {
  const RunConfig cfg = build_config(flags);
  const ProtocolState state = run_protocol(cfg);
  if (!flags.out.empty()) write_json(flags.out, state.transcript.to_json());
  const Verdict v = state.verdict.value_or(Verdict::Aborted);
  out << "n=" << cfg.n << " seed=" << cfg.seed << " (" << cfg.seed_source << ") attack=" << to_string(cfg.attack.kind)
      << "\nverdict: " << to_string(v);
  const Json& verdict = state.transcript.verdict();
  if (verdict.contains("reason")) out << " (" << verdict.at("reason").get<std::string>() << ")";
  out << "\n";
  if (!flags.out.empty()) out << "transcript: " << flags.out << "\n";
  return exit_code_for(v);
}

MessageQubit random_message(Rng& rng) {
  const double p = rng.uniform();
  const double phase_a = 2 * std::numbers::pi * rng.uniform();
  const double phase_b = 2 * std::numbers::pi * rng.uniform();
  return MessageQubit::make(std::polar(std::sqrt(p), phase_a), std::polar(std::sqrt(1 - p), phase_b));
}

int cmd_verify_table1(std::size_t trials, std::optional<std::uint64_t> seed_flag, int corrupt, const std::string& path,
                      std::ostream& out, std::ostream& err) {
  if (trials == 0) throw ConfigError("--trials must be at least 1");
  if (corrupt < -1 || corrupt > 15) throw ConfigError("--corrupt-branch takes 0-15");
  RunConfig seeded;
  resolve_seed(seed_flag, seeded);
  CorrectionLookup lookup = correction_for;
  if (corrupt >= 0) {
    lookup = [corrupt](const TeleportOutcomes& o) {
      const Pauli p = correction_for(o);
      return o.index() == corrupt ? static_cast<Pauli>((static_cast<int>(p) + 1) % 4) : p;
    };
  }
  Rng rng(seeded.seed);
  std::size_t passed = 0;
  std::size_t checks = 0;
  Json failures = Json::array();
  // Global phase of each corrected branch, taken from the first message.
  Json phases = Json::array();
  for (std::size_t t = 0; t < trials; ++t) {
    const MessageQubit m = random_message(rng);
    const Table1Report report = oracle_verify_table1(m, lookup);
    for (const BranchReport& b : report.branches) {
      ++checks;
      if (t == 0) {
        phases.push_back({{"branch", b.outcomes.index()},
                          {"outcomes", b.outcomes.describe()},
                          {"phase", b.recovered_phase.real() < 0 ? -1 : 1}});
      }
      if (b.passed) {
        ++passed;
        continue;
      }
      if (failures.size() < 16) {
        failures.push_back({{"trial", t},
                            {"branch", b.outcomes.index()},
                            {"outcomes", b.outcomes.describe()},
                            {"probability", b.probability},
                            {"recovered_fidelity", b.recovered_fidelity},
                            {"correction", to_string(lookup(b.outcomes))}});
      }
    }
  }
  out << "table check: " << passed << "/" << checks << " branch checks passed over " << trials << " messages\n";
  std::string negative;
  for (const auto& ph : phases) {
    if (ph.at("phase") == -1) negative += " " + std::to_string(ph.at("branch").get<int>());
  }
  if (!phases.empty()) out << "branches recovered up to phase -1:" << (negative.empty() ? " none" : negative) << "\n";
  for (const auto& f : failures) {
    err << "branch " << f.at("branch").get<int>() << " [" << f.at("outcomes").get<std::string>()
        << "] failed: correction " << f.at("correction").get<std::string>() << " gives fidelity "
        << f.at("recovered_fidelity").get<double>() << "\n";
  }
  if (!path.empty()) {
    Json body;
    body["command"] = "verify-table1";
    body["config"] = {{"trials", trials}, {"seed", seeded.seed}, {"seed_source", seeded.seed_source},
                      {"corrupt_branch", corrupt}};
    body["checks"] = checks;
    body["passed"] = passed;
    body["failures"] = failures;
    body["phases"] = phases;
    write_json(path, with_header(body));
  }
  return passed == checks ? kValid : kFailure;
}

struct ExperimentFlags {
  std::string kind;
  std::uint64_t trials = 1000;
  std::size_t l = 256;
  unsigned threads = 0;
};

int cmd_experiment(const ExperimentFlags& ef, const RunFlags& rf, std::ostream& out) {
  RunConfig cfg = build_config(rf);
  Json body;
  body["command"] = "experiment";
  if (ef.kind == "detection") {
    const ExperimentResult r = experiment_detection(cfg, ef.trials, cfg.seed, ef.threads);
    body["result"] = r.to_json();
    out << "detection rate " << r.estimate << " (" << r.successes << "/" << r.trials << "), 3-sigma ["
        << r.lower << ", " << r.upper << "]\n";
  } else if (ef.kind == "forgery") {
    const ExperimentResult r = experiment_forgery(cfg.attack.forgery, cfg.n, ef.trials, cfg.seed, ef.threads);
    body["result"] = r.to_json();
    out << "forgery acceptance " << r.estimate << " (" << r.successes << "/" << r.trials << "), 3-sigma ["
        << r.lower << ", " << r.upper << "]\n";
  } else if (ef.kind == "blindness") {
    const ExperimentResult r = experiment_blindness(cfg.n, ef.trials, cfg.seed, std::nullopt, ef.threads);
    body["result"] = r.to_json();
    out << "blindness violations: " << r.successes << " in " << r.trials << " trials\n";
  } else if (ef.kind == "efficiency") {
    if (ef.l == 0) throw ConfigError("--l must be at least 1");
    const EfficiencyReport formula = qubit_efficiency(cfg.n, ef.l);
    RunConfig honest = cfg;
    honest.attack = AttackSpec{};
    honest.hash.output_bits = ef.l;
    const EfficiencyReport counted = instrumented_efficiency(run_protocol(honest));
    const ComparisonReport table = comparison_table(cfg.n, ef.l);
    body["result"] = {{"formula", formula.to_json()}, {"instrumented", counted.to_json()},
                      {"comparison", table.to_json()}};
    out << "eta = " << formula.eta.to_string() << " (q_s=" << formula.q_s << ", q_t=" << formula.q_t
        << ", q_c=" << formula.q_c << ")\n"
        << "instrumented: eta = " << counted.eta.to_string() << " (q_t=" << counted.q_t << ", q_c=" << counted.q_c
        << ")\n"
        << table.to_text();
  } else {
    throw ConfigError("unknown experiment '" + ef.kind + "' (detection, forgery, blindness, efficiency)");
  }
  if (!rf.out.empty()) {
    Json config = cfg.to_json();
    config["trials"] = ef.trials;
    config["l"] = ef.l;
    Json doc;
    doc["command"] = "experiment";
    doc["kind"] = ef.kind;
    doc["config"] = config;
    doc["result"] = body["result"];
    write_json(rf.out, with_header(doc));
  }
  return kValid;
}

int cmd_replay(const std::string& path, std::ostream& out, std::ostream& err) {
  const Json recorded = read_json(path);
  Transcript original;
  try {
    original = Transcript::from_json(recorded);
  } catch (const std::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
  const Json& cfg_json = original.config();
  if (cfg_json.value("inputs", "derived") != "derived") {
    throw ConfigError("transcript used caller-supplied inputs, which it does not record; cannot replay");
  }
  const RunConfig cfg = RunConfig::from_json(cfg_json);
  const Json replayed = run_full(cfg).to_json();
  if (replayed == recorded) {
    out << "replay identical: " << original.events().size() << " events, verdict "
        << recorded.at("verdict").dump() << "\n";
    return kValid;
  }
  const auto& a = recorded.at("events");
  const auto& b = replayed.at("events");
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  err << "replay mismatch";
  if (i < a.size() || i < b.size()) {
    err << " at event " << i << "\n  recorded: " << (i < a.size() ? a[i].dump() : "<none>")
        << "\n  replayed: " << (i < b.size() ? b[i].dump() : "<none>");
  } else {
    err << " outside the event list";
  }
  err << "\n";
  return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semiquantum proxy blind signature simulator", "sqpbs"};
  app.set_version_flag("--version", SQPBS_VERSION);
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run one protocol instance and write its transcript");
  add_run_flags(*run_cmd, run_flags);

  std::size_t table_trials = 100;
  std::optional<std::uint64_t> table_seed;
  int corrupt = -1;
  std::string table_out;
  CLI::App* table_cmd = app.add_subcommand("verify-table1", "check the teleportation correction table by projection");
  table_cmd->add_option("--trials", table_trials, "random message qubits")->capture_default_str();
  table_cmd->add_option("--seed", table_seed, "seed for the message qubits");
  table_cmd->add_option("--corrupt-branch", corrupt, "test mode: use a wrong correction on this branch (0-15)");
  table_cmd->add_option("--out", table_out, "report JSON path");

  ExperimentFlags exp_flags;
  RunFlags exp_run;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "batch experiments");
  exp_cmd->add_option("kind", exp_flags.kind, "detection, forgery, blindness or efficiency")->required();
  exp_cmd->add_option("--trials", exp_flags.trials, "trial count")->capture_default_str();
  exp_cmd->add_option("--l", exp_flags.l, "signature hash length for efficiency")->capture_default_str();
  exp_cmd->add_option("--threads", exp_flags.threads, "worker threads (0 = all cores)")->capture_default_str();
  add_run_flags(*exp_cmd, exp_run);

  std::string replay_path;
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-execute a transcript's config and compare");
  replay_cmd->add_option("transcript", replay_path, "transcript JSON")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kValid : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, out);
    if (*table_cmd) return cmd_verify_table1(table_trials, table_seed, corrupt, table_out, out, err);
    if (*exp_cmd) return cmd_experiment(exp_flags, exp_run, out);
    if (*replay_cmd) return cmd_replay(replay_path, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return kFailure;
}

}  // namespace sqpbs::cli
