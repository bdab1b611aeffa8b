#include "sqpbs/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sqpbs/errors.hpp"

namespace sqpbs {
namespace {

// Runs body(trial) for trial in [0, trials) across workers; returns how many returned true.
template <typename Body>
std::uint64_t count_parallel(std::uint64_t trials, unsigned threads, Body body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(threads ? threads : default_threads(), std::max<std::uint64_t>(trials, 1)));
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> hits{0};
  auto work = [&] {
    std::uint64_t local = 0;
    for (std::uint64_t t = next++; t < trials; t = next++) local += body(t) ? 1 : 0;
    hits += local;
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return hits.load();
}

void require_trials(std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::string Rational::to_string() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

bool operator<(const Rational& a, const Rational& b) {
  return a.num_ * b.den_ < b.num_ * a.den_;
}

Json EfficiencyReport::to_json() const {
  Json j;
  j["protocol"] = protocol;
  j["n"] = n;
  j["l"] = l;
  j["q_s"] = q_s;
  j["q_t"] = q_t;
  j["q_c"] = q_c;
  j["eta"] = eta.to_string();
  j["eta_decimal"] = eta.to_double();
  return j;
}

EfficiencyReport qubit_efficiency(std::uint64_t n, std::uint64_t l) {
  if (n == 0 || l == 0) throw std::invalid_argument("n and l must be at least 1");
  EfficiencyReport r;
  r.protocol = "this protocol (accounting totals)";
  r.n = n;
  r.l = l;
  r.q_s = 2 * n;
  r.q_t = 4 * n + n + n + 8 * n + 8 * n + 8 * n;
  r.q_c = l + 4 * n;
  r.eta = Rational(static_cast<std::int64_t>(r.q_s), static_cast<std::int64_t>(r.q_t + r.q_c));
  return r;
}

EfficiencyReport instrumented_efficiency(const ProtocolState& state, const AccountingRules& rules) {
  const QubitLedger& led = state.ledger;
  EfficiencyReport r;
  r.protocol = "this protocol (instrumented run)";
  r.n = state.config.n;
  r.l = state.config.hash.output_bits;
  // Both M_D bits per instance carry the signature.
  r.q_s = 2 * r.n;
  r.q_t = led.chi_qubits + led.message_qubits + led.g_prime_qubits + rules.bb84_qubits_per_key_bit * led.bb84_key_bits +
          rules.sqkd_qubits_per_key_bit * led.sqkd_key_bits;
  for (const Json* e : state.transcript.find("classical")) {
    if (e->at("category") == to_string(MessageCategory::Signature)) r.q_c += e->at("bits").get<std::string>().size();
  }
  r.eta = Rational(static_cast<std::int64_t>(r.q_s), static_cast<std::int64_t>(r.q_t + r.q_c));
  return r;
}

Json ComparisonReport::to_json() const {
  Json j;
  Json rs = Json::array();
  for (const auto& row : rows) {
    rs.push_back({{"protocol", row.protocol},
                  {"qubit_efficiency", row.efficiency},
                  {"quantum_resource", row.quantum_resource},
                  {"semiquantum_parties", row.semiquantum_parties},
                  {"proxy_signers", row.proxy_signers},
                  {"eavesdropping_check", row.eavesdropping_check},
                  {"measurements", row.measurements}});
  }
  j["rows"] = rs;
  j["n"] = n;
  j["l"] = l;
  j["ours"] = ours.to_string();
  j["ref23"] = ref23.to_string();
  j["ours_exceeds_ref23"] = ours_exceeds_ref23;
  j["regime"] = ours_exceeds_ref23 ? "l < 24n" : "l >= 24n";
  return j;
}

std::string ComparisonReport::to_text() const {
  std::ostringstream os;
  for (const auto& row : rows) {
    os << row.protocol << "\n"
       << "  qubit efficiency:    " << row.efficiency << "\n"
       << "  quantum resource:    " << row.quantum_resource << "\n"
       << "  semiquantum parties: " << row.semiquantum_parties << "\n"
       << "  proxy signers:       " << row.proxy_signers << "\n"
       << "  eavesdropping check: " << row.eavesdropping_check << "\n"
       << "  measurements:        " << row.measurements << "\n";
  }
  os << "at n=" << n << ", l=" << l << ": eta = " << ours.to_string() << " ("
     << (ours_exceeds_ref23 ? "above" : "not above") << " 1/29, l " << (ours_exceeds_ref23 ? "<" : ">=") << " 24n)\n";
  return os.str();
}

ComparisonReport comparison_table(std::uint64_t n, std::uint64_t l) {
  ComparisonReport r;
  r.rows = {
      {"Ref.[21]", "2/31", "W states and single-particle states", "the signature verifier", "zero", "no",
       "three-particle entangled state and Z basis (quantum); Z basis (semiquantum)"},
      {"Ref.[23]", "1/29", "five-particle GHZ states and single-particle states", "the signature verifier", "zero",
       "yes", "Z basis (quantum); Z basis (semiquantum)"},
      {"this protocol", "2n/(34n+l)", "chi states and single-particle states",
       "the original signer and the signature verifier", "one", "yes",
       "Bell basis and Z basis (quantum); Z basis (semiquantum)"},
  };
  r.ref21 = Rational(2, 31);
  r.ref23 = Rational(1, 29);
  r.n = n;
  r.l = l;
  r.ours = qubit_efficiency(n, l).eta;
  r.ours_exceeds_ref23 = r.ours > r.ref23;
  return r;
}

bool ExperimentResult::within_3sigma(double expected) const {
  const double s = std::sqrt(expected * (1.0 - expected) / static_cast<double>(trials));
  return std::abs(estimate - expected) <= 3.0 * s;
}

Json ExperimentResult::to_json() const {
  Json j;
  j["experiment"] = name;
  j["trials"] = trials;
  j["successes"] = successes;
  j["estimate"] = estimate;
  j["sigma"] = sigma;
  j["interval_3sigma"] = {lower, upper};
  j["config"] = config;
  return j;
}

ExperimentResult make_result(std::string name, std::uint64_t trials, std::uint64_t successes, Json config) {
  require_trials(trials);
  ExperimentResult r;
  r.name = std::move(name);
  r.trials = trials;
  r.successes = successes;
  r.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  r.sigma = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
  r.lower = std::max(0.0, r.estimate - 3.0 * r.sigma);
  r.upper = std::min(1.0, r.estimate + 3.0 * r.sigma);
  r.config = std::move(config);
  return r;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentResult experiment_detection(const RunConfig& base, std::uint64_t trials, std::uint64_t seed,
                                      unsigned threads) {
  require_trials(trials);
  base.validate();
  const std::uint64_t hits = count_parallel(trials, threads, [&](std::uint64_t t) {
    RunConfig cfg = base;
    cfg.seed = Rng::derive(seed, t);
    const ProtocolState s = run_protocol(cfg);
    if (s.verdict != Verdict::Aborted) return false;
    const Json& v = s.transcript.verdict();
    return v.contains("reason") && v.at("reason") == to_string(AbortReason::EavesdroppingDetected);
  });
  Json cfg = base.to_json();
  cfg.erase("seed");
  cfg["experiment_seed"] = seed;
  return make_result("detection", trials, hits, cfg);
}

ExperimentResult experiment_forgery(ForgeryModel model, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads) {
  require_trials(trials);
  RunConfig base;
  base.n = n;
  base.attack.kind = AttackKind::ForgeMd;
  base.attack.forgery = model;
  base.validate();
  const std::uint64_t hits = count_parallel(trials, threads, [&](std::uint64_t t) {
    RunConfig cfg = base;
    cfg.seed = Rng::derive(seed, t);
    return run_protocol(cfg).verdict == Verdict::Valid;
  });
  Json cfg = base.to_json();
  cfg.erase("seed");
  cfg["experiment_seed"] = seed;
  return make_result("forgery", trials, hits, cfg);
}

ExperimentResult experiment_blindness(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                      std::optional<BitString> delta, unsigned threads) {
  require_trials(trials);
  if (delta && delta->size() != n) throw std::invalid_argument("delta must have length n");
  RunConfig base;
  base.n = n;
  base.validate();
  const std::uint64_t violations = count_parallel(trials, threads, [&](std::uint64_t t) {
    Rng rng(Rng::derive(seed, t));
    const BitString g_a = BitString::random(n, rng);
    const BitString k_a = BitString::random(n, rng);
    const BitString d = delta ? *delta : BitString::random(n, rng);
    RunConfig cfg = base;
    cfg.seed = rng.next_u64();
    const std::string first = run_full(cfg, AliceInputs{g_a, k_a}).dump();
    const std::string second = run_full(cfg, AliceInputs{g_a ^ d, k_a ^ d}).dump();
    return first != second;
  });
  Json cfg = base.to_json();
  cfg.erase("seed");
  cfg["experiment_seed"] = seed;
  if (delta) cfg["delta"] = delta->to_string();
  return make_result("blindness", trials, violations, cfg);
}

}  // namespace sqpbs
