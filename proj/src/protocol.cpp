#include "sqpbs/protocol.hpp"

#include <numbers>
#include <sstream>

#include "sqpbs/errors.hpp"

namespace sqpbs {
namespace {

// Independent streams derived from the run seed.
enum Stream : std::uint64_t { kProtocol = 0, kAlice = 1, kHashSecret = 2, kAdversary = 3, kForger = 4 };

void require_phase(const ProtocolState& state, Phase expected) {
  if (state.phase != expected) {
    throw std::logic_error(std::string("expected phase ") + to_string(expected) + ", state is in " +
                           to_string(state.phase));
  }
}

void enter(ProtocolState& state, Phase next) {
  Json fields;
  fields["from"] = to_string(state.phase);
  fields["to"] = to_string(next);
  state.transcript.append("phase", fields);
  state.phase = next;
  state.transcript.set_phase(next);
}

Adversary* adversary_on(ProtocolState& state, QuantumChannel channel) {
  const AttackSpec& attack = state.config.attack;
  if (!state.adversary || attack.channel != channel) return nullptr;
  return state.adversary.get();
}

BitString basis_bits(const Transmission& t) {
  BitString out;
  for (DecoyState d : t.decoy_states) out.push_back(basis_of(d) == Basis::X);
  return out;
}

BitString position_mask(const Transmission& t) {
  BitString out;
  for (const Slot& s : t.slots) out.push_back(s.decoy);
  return out;
}

Transmission transmit(ProtocolState& state, QuantumChannel channel, Party from, Party to,
                      std::span<const QubitRef> payload) {
  Transmission t = send_with_decoys(to_string(channel), from, to, payload, state.config.decoy_count(), state.rng,
                                    adversary_on(state, channel));
  state.ledger.decoy_qubits += t.decoy_states.size();
  Json fields;
  fields["channel"] = t.channel;
  fields["from"] = to_string(from);
  fields["to"] = to_string(to);
  fields["payload"] = t.payload_count();
  fields["decoys"] = t.decoy_states.size();
  state.transcript.append("quantum_send", fields);
  return t;
}

[[noreturn]] void abort_eavesdropping(const Transmission& t, double error_rate, double threshold) {
  std::ostringstream os;
  os << t.channel << ": error rate " << error_rate << " exceeds threshold " << threshold;
  throw ProtocolAbort(AbortReason::EavesdroppingDetected, os.str());
}

// Quantum receiver: the sender announces positions and bases, the receiver
// measures and reports, the sender compares.
void quantum_decoy_check(ProtocolState& state, Transmission& t) {
  Transcript& log = state.transcript;
  classical_send(t.from, t.to, t.channel + " decoy positions", position_mask(t), MessageCategory::Detection, log);
  classical_send(t.from, t.to, t.channel + " decoy bases", basis_bits(t), MessageCategory::Detection, log);
  const DecoyCheck check = measure_decoys(t, state.rng, state.config.threshold);
  BitString results;
  for (std::size_t k = 0; k < t.decoy_qubits.size(); ++k) {
    const auto probs = outcome_probabilities(t.decoy_qubits[k], 0, basis_of(t.decoy_states[k]));
    results.push_back(probs[1] > 0.5);
  }
  classical_send(t.to, t.from, t.channel + " decoy results", results, MessageCategory::Detection, log);

  Json fields;
  fields["channel"] = t.channel;
  fields["method"] = "quantum";
  fields["checker"] = to_string(t.from);
  fields["decoys"] = check.decoys;
  fields["errors"] = check.errors;
  fields["error_rate"] = check.error_rate;
  fields["passed"] = check.passed;
  log.append("decoy_check", fields);
  if (!check.passed) abort_eavesdropping(t, check.error_rate, state.config.threshold);
}

// Semiquantum receiver: SIFT/CTRL/reorder with the preparer.
void semiquantum_check(ProtocolState& state, Transmission& t) {
  Transcript& log = state.transcript;
  classical_send(t.from, t.to, t.channel + " decoy positions", position_mask(t), MessageCategory::Detection, log);
  const ReturnCheck check = semiquantum_return_check(t, state.rng, state.config.threshold);

  BitString z_prepared;
  BitString ctrl;
  BitString sift_results;
  for (std::size_t k = 0; k < t.decoy_states.size(); ++k) {
    z_prepared.push_back(basis_of(t.decoy_states[k]) == Basis::Z);
    ctrl.push_back(check.reflected[k]);
    if (!check.reflected[k]) {
      sift_results.push_back(outcome_probabilities(t.decoy_qubits[k], 0, Basis::Z)[1] > 0.5);
    }
  }
  classical_send(t.from, t.to, t.channel + " z-prepared decoys", z_prepared, MessageCategory::Detection, log);
  classical_send(t.to, t.from, t.channel + " ctrl positions", ctrl, MessageCategory::Detection, log);
  classical_send(t.to, t.from, t.channel + " sift results", sift_results, MessageCategory::Detection, log);

  Json fields;
  fields["channel"] = t.channel;
  fields["method"] = "semiquantum";
  fields["checker"] = to_string(t.from);
  fields["decoys"] = check.decoys;
  fields["reflection_order"] = check.reflection_order;
  fields["reflected"] = check.reflected_count;
  fields["reflected_errors"] = check.reflected_errors;
  fields["reflected_rate"] = check.reflected_rate;
  fields["z_sift"] = check.z_sift_count;
  fields["z_sift_errors"] = check.z_sift_errors;
  fields["z_sift_rate"] = check.z_sift_rate;
  fields["passed"] = check.passed;
  log.append("decoy_check", fields);
  if (!check.passed) {
    abort_eavesdropping(t, std::max(check.reflected_rate, check.z_sift_rate), state.config.threshold);
  }
}

Transmission take_pending(ProtocolState& state, QuantumChannel channel) {
  const std::string name = to_string(channel);
  for (auto it = state.pending.begin(); it != state.pending.end(); ++it) {
    if (it->channel == name) {
      Transmission t = std::move(*it);
      state.pending.erase(it);
      return t;
    }
  }
  throw std::logic_error("no pending transmission on " + name);
}

void log_key(ProtocolState& state, const char* key, const char* scheme, Party a, Party b, const KeyEstablishment& k) {
  Json fields;
  fields["key"] = key;
  fields["scheme"] = scheme;
  fields["parties"] = {to_string(a), to_string(b)};
  fields["length"] = k.quantum_key.size();
  fields["raw_qubits"] = k.raw_qubits;
  fields["sifted_bits"] = k.sifted_bits;
  fields["check_bits"] = k.check_bits;
  fields["error_rate"] = k.error_rate;
  state.transcript.append("key_establishment", fields);
}

void establish_keys(ProtocolState& state) {
  const std::size_t n = state.config.n;
  const double threshold = state.config.threshold;
  if (state.config.key_mode == KeyMode::Stubbed) {
    state.keys.k_dt = BitString::random(2 * n, state.rng);
    state.keys.k_bt = BitString::random(n, state.rng);
    state.keys.k_ct = BitString::random(n, state.rng);
    for (const char* key : {"K_DT", "K_BT", "K_CT"}) {
      Json fields;
      fields["key"] = key;
      fields["scheme"] = "stubbed";
      fields["length"] = std::string(key) == "K_DT" ? 2 * n : n;
      state.transcript.append("key_establishment", fields);
    }
    return;
  }

  const KeyEstablishment dt = establish_key_bb84(2 * n, state.rng, nullptr, threshold);
  log_key(state, "K_DT", "bb84", Party::Trent, Party::David, dt);
  const KeyEstablishment bt = establish_key_sqkd(n, state.rng, Party::Bob, nullptr, threshold);
  log_key(state, "K_BT", "sqkd", Party::Trent, Party::Bob, bt);
  const KeyEstablishment ct = establish_key_sqkd(n, state.rng, Party::Charlie, nullptr, threshold);
  log_key(state, "K_CT", "sqkd", Party::Trent, Party::Charlie, ct);

  state.keys.k_dt = dt.quantum_key;
  state.keys.k_bt = bt.quantum_key;
  state.keys.k_ct = ct.quantum_key;
  state.ledger.bb84_raw_qubits += dt.raw_qubits;
  state.ledger.bb84_key_bits += dt.quantum_key.size();
  state.ledger.sqkd_raw_qubits += bt.raw_qubits + ct.raw_qubits;
  state.ledger.sqkd_key_bits += bt.quantum_key.size() + ct.quantum_key.size();
}

std::vector<QubitRef> particle_refs(ProtocolState& state, int particle) {
  std::vector<QubitRef> refs;
  refs.reserve(state.registers.size());
  const int q = state.qubit_of(particle);
  for (auto& reg : state.registers) refs.push_back({&reg, q});
  return refs;
}

std::unique_ptr<Adversary> make_adversary(const RunConfig& cfg) {
  const std::uint64_t seed = Rng::derive(cfg.seed, kAdversary);
  switch (cfg.attack.kind) {
    case AttackKind::InterceptResend: return std::make_unique<InterceptResend>(seed);
    case AttackKind::EntangleMeasure: return std::make_unique<EntangleMeasure>(seed, *cfg.attack.eve);
    default: return nullptr;
  }
}

}  // namespace

const char* to_string(QuantumChannel channel) {
  switch (channel) {
    case QuantumChannel::W1: return "W1";
    case QuantumChannel::W2: return "W2";
    case QuantumChannel::W4: return "W4";
    case QuantumChannel::XiM: return "xi_m";
    case QuantumChannel::GPrime: return "G'";
  }
  return "?";
}

QuantumChannel parse_channel(const std::string& text) {
  for (auto c : {QuantumChannel::W1, QuantumChannel::W2, QuantumChannel::W4, QuantumChannel::XiM,
                 QuantumChannel::GPrime}) {
    if (text == to_string(c)) return c;
  }
  throw ConfigError("unknown channel '" + text + "'");
}

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResend: return "intercept-resend";
    case AttackKind::EntangleMeasure: return "entangle-measure";
    case AttackKind::ForgeMd: return "forge-md";
  }
  return "?";
}

AttackKind parse_attack(const std::string& text) {
  for (auto k : {AttackKind::None, AttackKind::InterceptResend, AttackKind::EntangleMeasure, AttackKind::ForgeMd}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown attack '" + text + "'");
}

const char* to_string(ForgeryModel model) {
  return model == ForgeryModel::OutsideRandomMd ? "outside-random-md" : "inside-no-key";
}

ForgeryModel parse_forgery(const std::string& text) {
  if (text == "outside-random-md") return ForgeryModel::OutsideRandomMd;
  if (text == "inside-no-key") return ForgeryModel::InsideNoKey;
  throw ConfigError("unknown forgery model '" + text + "'");
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Valid: return "valid";
    case Verdict::Invalid: return "invalid";
    case Verdict::Aborted: return "aborted";
  }
  return "?";
}

void RunConfig::validate() const {
  if (n == 0) throw ConfigError("n must be at least 1");
  if (n > 4096) throw ConfigError("n must be at most 4096");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
  if (hash.output_bits == 0) throw ConfigError("hash output length must be positive");
  if (hash_secret_bits == 0) throw ConfigError("hash secret length must be positive");
  if (attack.kind == AttackKind::EntangleMeasure && !attack.eve) {
    throw ConfigError("entangle-measure attack requires Eve's parameters");
  }
  for (std::size_t bit : attack.tamper_md_bits) {
    if (bit >= 2 * n) throw ConfigError("tampered M_D bit index out of range");
  }
  if (attack.withhold && *attack.withhold != Party::Bob && *attack.withhold != Party::David &&
      *attack.withhold != Party::Charlie) {
    throw ConfigError("only Bob, David or Charlie hold a record Trent needs");
  }
}

Json to_json(const EveParams& params) {
  auto complex_json = [](Complex c) { return Json::array({c.real(), c.imag()}); };
  Json j;
  Json alpha = Json::array();
  Json eps = Json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    alpha.push_back(complex_json(params.alpha()[i]));
    Json v = Json::array();
    for (Eigen::Index k = 0; k < params.probe_dimension(); ++k) v.push_back(complex_json(params.eps()[i][k]));
    eps.push_back(v);
  }
  j["alpha"] = alpha;
  j["eps"] = eps;
  return j;
}

EveParams eve_params_from_json(const Json& j) {
  auto complex_of = [](const Json& c) {
    if (!c.is_array() || c.size() != 2) throw ConfigError("complex numbers are written [re, im]");
    return Complex{c.at(0).get<double>(), c.at(1).get<double>()};
  };
  if (!j.contains("alpha") || !j.contains("eps") || j.at("alpha").size() != 4 || j.at("eps").size() != 4) {
    throw ConfigError("Eve parameters need four 'alpha' entries and four 'eps' vectors (order 00, 01, 10, 11)");
  }
  std::array<Complex, 4> alpha{};
  std::array<Amplitudes, 4> eps{};
  for (std::size_t i = 0; i < 4; ++i) {
    alpha[i] = complex_of(j.at("alpha").at(i));
    const Json& v = j.at("eps").at(i);
    eps[i] = Amplitudes(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) eps[i][static_cast<Eigen::Index>(k)] = complex_of(v.at(k));
  }
  try {
    return EveParams::make(alpha, eps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Json RunConfig::to_json() const {
  Json j;
  j["n"] = n;
  j["seed"] = seed;
  if (!seed_source.empty()) j["seed_source"] = seed_source;
  j["decoys"] = decoy_count();
  j["threshold"] = threshold;
  Json a;
  a["kind"] = to_string(attack.kind);
  if (attack.kind == AttackKind::InterceptResend || attack.kind == AttackKind::EntangleMeasure) {
    a["channel"] = to_string(attack.channel);
  }
  if (attack.eve) a["eve"] = sqpbs::to_json(*attack.eve);
  if (attack.kind == AttackKind::ForgeMd) a["forgery"] = to_string(attack.forgery);
  if (!attack.tamper_md_bits.empty()) a["tamper_md_bits"] = attack.tamper_md_bits;
  if (attack.withhold) a["withhold"] = sqpbs::to_string(*attack.withhold);
  j["attack"] = a;
  j["hash"] = {{"algorithm", hash.algorithm}, {"bits", hash.output_bits}};
  j["hash_secret_bits"] = hash_secret_bits;
  j["key_mode"] = key_mode == KeyMode::Simulated ? "simulated" : "stubbed";
  return j;
}

RunConfig RunConfig::from_json(const Json& j) {
  try {
    RunConfig c;
    c.n = j.at("n").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("seed_source")) c.seed_source = j.at("seed_source").get<std::string>();
    c.decoys = j.at("decoys").get<std::size_t>();
    c.threshold = j.at("threshold").get<double>();
    const Json& a = j.at("attack");
    c.attack.kind = parse_attack(a.at("kind").get<std::string>());
    if (a.contains("channel")) c.attack.channel = parse_channel(a.at("channel").get<std::string>());
    if (a.contains("eve")) c.attack.eve = eve_params_from_json(a.at("eve"));
    if (a.contains("forgery")) c.attack.forgery = parse_forgery(a.at("forgery").get<std::string>());
    if (a.contains("tamper_md_bits")) c.attack.tamper_md_bits = a.at("tamper_md_bits").get<std::vector<std::size_t>>();
    if (a.contains("withhold")) {
      const auto who = a.at("withhold").get<std::string>();
      if (who == "Bob") c.attack.withhold = Party::Bob;
      else if (who == "David") c.attack.withhold = Party::David;
      else if (who == "Charlie") c.attack.withhold = Party::Charlie;
      else throw ConfigError("cannot withhold a record from '" + who + "'");
    }
    c.hash.algorithm = j.at("hash").at("algorithm").get<std::string>();
    c.hash.output_bits = j.at("hash").at("bits").get<std::size_t>();
    c.hash_secret_bits = j.at("hash_secret_bits").get<std::size_t>();
    const auto mode = j.at("key_mode").get<std::string>();
    if (mode != "simulated" && mode != "stubbed") throw ConfigError("unknown key mode '" + mode + "'");
    c.key_mode = mode == "simulated" ? KeyMode::Simulated : KeyMode::Stubbed;
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run configuration: ") + e.what());
  }
}

ProtocolState::ProtocolState(RunConfig cfg)
    : config(std::move(cfg)), rng(Rng::derive(config.seed, kProtocol)), adversary(make_adversary(config)) {}

int ProtocolState::qubit_of(int particle) const {
  if (particle < 0 || particle > 4) throw std::out_of_range("particle label must be 0 (m) or 1-4");
  const bool has_message = phase != Phase::Init && phase != Phase::Blind;
  if (!has_message && particle == 0) throw std::logic_error("message qubit not prepared yet");
  return has_message ? particle : particle - 1;
}

Measurement party_measure(Party party, const StateVector& state, int qubit, Basis basis, Rng& rng) {
  require_capability(party, basis == Basis::Z ? QuantumOp::MeasureZ : QuantumOp::MeasureX);
  return measure(state, qubit, basis, rng);
}

BellMeasurement party_measure_bell(Party party, const StateVector& state, int qubit_a, int qubit_b, Rng& rng) {
  require_capability(party, QuantumOp::MeasureBell);
  return measure_bell(state, qubit_a, qubit_b, rng);
}

MessageQubit blinded_message_qubit(int bit) {
  const double r = std::numbers::sqrt2 / 2;
  return MessageQubit::make(r, bit ? -r : r);
}

ProtocolState phase_initialize(const RunConfig& config, const std::optional<AliceInputs>& inputs) {
  config.validate();
  ProtocolState state(config);
  const std::size_t n = config.n;
  Json cfg = config.to_json();
  cfg["inputs"] = inputs ? "caller-supplied" : "derived";
  state.transcript.set_config(cfg);
  state.transcript.set_phase(Phase::Init);

  // Step 1: keys.
  state.keys.n = n;
  establish_keys(state);
  Rng alice(Rng::derive(config.seed, kAlice));
  if (inputs) {
    if (inputs->g_a.size() != n || inputs->k_a.size() != n) throw ConfigError("g_A and K_A must have length n");
    state.g_a = inputs->g_a;
    state.keys.k_a = inputs->k_a;
    state.inputs_supplied = true;
  } else {
    state.g_a = BitString::random(n, alice);
    state.keys.k_a = BitString::random(n, alice);
  }
  Rng secret(Rng::derive(config.seed, kHashSecret));
  state.keys.hash_secret = BitString::random(config.hash_secret_bits, secret);
  state.keys.validate();

  // Step 2: χ instances; W1', W2', W4' dispatched, W3 kept by Trent.
  require_capability(Party::Trent, QuantumOp::PrepareEntangled);
  state.registers.assign(n, prepare_chi());
  state.ledger.chi_qubits += 4 * n;
  {
    const auto w1 = particle_refs(state, 1);
    state.pending.push_back(transmit(state, QuantumChannel::W1, Party::Trent, Party::Bob, w1));
    const auto w4 = particle_refs(state, 4);
    state.pending.push_back(transmit(state, QuantumChannel::W4, Party::Trent, Party::Charlie, w4));
    const auto w2 = particle_refs(state, 2);
    state.pending.push_back(transmit(state, QuantumChannel::W2, Party::Trent, Party::David, w2));
  }

  // Step 3: blind message and H(g).
  state.g = xor_blind(state.g_a, state.keys.k_a);
  state.hash_g = keyed_hash(config.hash, state.keys.hash_secret, state.g);
  classical_send(Party::Alice, Party::Charlie, "H(g)", state.hash_g, MessageCategory::Signature, state.transcript);

  enter(state, Phase::Blind);
  return state;
}

void phase_blind(ProtocolState& state) {
  require_phase(state, Phase::Blind);
  for (std::size_t i = 0; i < state.registers.size(); ++i) {
    const MessageQubit xi = blinded_message_qubit(state.g[i]);
    require_capability(Party::Alice, QuantumOp::PrepareX);
    state.registers[i] = tensor(prepare_message(xi), state.registers[i]);
  }
  state.ledger.message_qubits += state.registers.size();
  enter(state, Phase::SignAuth);
}

void phase_sign(ProtocolState& state) {
  require_phase(state, Phase::SignAuth);
  const std::size_t n = state.config.n;
  Transcript& log = state.transcript;

  // Steps 1-2: ξ_m' to David, decoy check, approval request.
  {
    const auto xi = particle_refs(state, 0);
    Transmission t = transmit(state, QuantumChannel::XiM, Party::Alice, Party::David, xi);
    quantum_decoy_check(state, t);
  }
  classical_send(Party::David, Party::Bob, "approval request", {}, MessageCategory::Control, log);

  // Step 3: Bob's return check on W1'.
  {
    Transmission w1 = take_pending(state, QuantumChannel::W1);
    semiquantum_check(state, w1);
  }

  // Step 4: Bob measures W1 in Z and sends E_KBT[M_B].
  classical_send(Party::Bob, Party::David, "approval", {}, MessageCategory::Control, log);
  BitString m_b;
  for (auto& reg : state.registers) {
    Measurement m = party_measure(Party::Bob, reg, state.qubit_of(1), Basis::Z, state.rng);
    reg = std::move(m.state);
    m_b.push_back(m.bit);
  }
  log.add_measurement(Party::Bob, to_string(QuantumOp::MeasureZ), "M_B", m_b.to_string());
  OneTimePad bob_pad(state.keys.k_bt);
  OneTimePad trent_bt(state.keys.k_bt);
  const bool bob_sends = state.config.attack.withhold != Party::Bob;
  if (bob_sends) {
    const BitString c_b = bob_pad.apply_next(m_b);
    classical_send(Party::Bob, Party::Trent, "E_KBT[M_B]", c_b, MessageCategory::Signature, log);
    // Step 5.
    state.m_b = trent_bt.apply_next(c_b);
  }
  classical_send(Party::Trent, Party::David, "sign notification", {}, MessageCategory::Control, log);

  // Step 6: David checks W2', Bell-measures (ξ_i, W2_i), sends E_KDT(M_D).
  {
    Transmission w2 = take_pending(state, QuantumChannel::W2);
    quantum_decoy_check(state, w2);
  }
  BitString m_d;
  for (auto& reg : state.registers) {
    BellMeasurement m = party_measure_bell(Party::David, reg, state.qubit_of(0), state.qubit_of(2), state.rng);
    reg = std::move(m.state);
    m_d.push_back(m.outcome.high_bit());
    m_d.push_back(m.outcome.low_bit());
  }
  log.add_measurement(Party::David, to_string(QuantumOp::MeasureBell), "M_D", m_d.to_string());
  OneTimePad david_pad(state.keys.k_dt);
  OneTimePad trent_dt(state.keys.k_dt);
  const bool david_sends = state.config.attack.withhold != Party::David;
  if (david_sends) {
    BitString c_d = david_pad.apply_next(m_d);
    const AttackSpec& attack = state.config.attack;
    if (attack.kind == AttackKind::ForgeMd) {
      Rng forger(Rng::derive(state.config.seed, kForger));
      if (attack.forgery == ForgeryModel::OutsideRandomMd) {
        c_d = BitString::random(2 * n, forger);
      } else {
        // Bob knows M_B but not K_DT: he encrypts his chosen M_D under a guessed pad.
        BitString chosen;
        for (std::size_t i = 0; i < n; ++i) {
          chosen.push_back(state.m_b.empty() ? 0 : state.m_b[i]);
          chosen.push_back(0);
        }
        c_d = otp_encrypt(BitString::random(2 * n, forger), chosen);
      }
    }
    for (std::size_t bit : attack.tamper_md_bits) c_d.flip(bit);
    classical_send(Party::David, Party::Trent, "E_KDT(M_D)", c_d, MessageCategory::Signature, log);
    // Step 7.
    state.m_d = trent_dt.apply_next(c_d);
  }
  classical_send(Party::Trent, Party::Charlie, "measure notification", {}, MessageCategory::Control, log);

  // Step 8: Charlie checks W4', measures W4 in Z, sends E_KCT(M_C).
  {
    Transmission w4 = take_pending(state, QuantumChannel::W4);
    semiquantum_check(state, w4);
  }
  BitString m_c;
  for (auto& reg : state.registers) {
    Measurement m = party_measure(Party::Charlie, reg, state.qubit_of(4), Basis::Z, state.rng);
    reg = std::move(m.state);
    m_c.push_back(m.bit);
  }
  log.add_measurement(Party::Charlie, to_string(QuantumOp::MeasureZ), "M_C", m_c.to_string());
  OneTimePad charlie_pad(state.keys.k_ct);
  OneTimePad trent_ct(state.keys.k_ct);
  if (state.config.attack.withhold != Party::Charlie) {
    const BitString c_c = charlie_pad.apply_next(m_c);
    classical_send(Party::Charlie, Party::Trent, "E_KCT(M_C)", c_c, MessageCategory::Signature, log);
    state.m_c = trent_ct.apply_next(c_c);
  }

  // Step 9: Trent corrects W3, reads ξ_m in X, prepares G' and sends G''.
  if (state.m_b.size() != n) throw ProtocolAbort(AbortReason::MissingRecord, "Trent never received M_B from Bob");
  if (state.m_d.size() != 2 * n) throw ProtocolAbort(AbortReason::MissingRecord, "Trent never received M_D from David");
  if (state.m_c.size() != n) throw ProtocolAbort(AbortReason::MissingRecord, "Trent never received M_C from Charlie");

  BitString g_prime;
  for (std::size_t i = 0; i < n; ++i) {
    const TeleportOutcomes outcomes{state.m_b[i], BellOutcome::from_bits(state.m_d[2 * i], state.m_d[2 * i + 1]),
                                    state.m_c[i]};
    const Pauli fix = correction_for(outcomes);
    state.corrections.push_back(fix);
    StateVector& reg = state.registers[i];
    require_capability(Party::Trent, QuantumOp::ApplyUnitary);
    reg = apply_unitary(reg, state.qubit_of(3), matrix_of(fix));
    state.recovered.push_back(reg);
    Measurement m = party_measure(Party::Trent, reg, state.qubit_of(3), Basis::X, state.rng);
    reg = std::move(m.state);
    g_prime.push_back(m.bit);
  }
  log.add_measurement(Party::Trent, to_string(QuantumOp::MeasureX), "xi_m", g_prime.to_string());
  state.g_prime_sent = g_prime;

  require_capability(Party::Trent, QuantumOp::PrepareZ);
  state.g_prime_qubits.clear();
  for (std::size_t i = 0; i < n; ++i) state.g_prime_qubits.push_back(kets::basis_state(Basis::Z, g_prime[i]));
  state.ledger.g_prime_qubits += n;
  std::vector<QubitRef> refs;
  for (auto& q : state.g_prime_qubits) refs.push_back({&q, 0});
  state.pending.push_back(transmit(state, QuantumChannel::GPrime, Party::Trent, Party::Charlie, refs));

  enter(state, Phase::Verify);
}

Verdict phase_verify(ProtocolState& state) {
  require_phase(state, Phase::Verify);
  {
    Transmission t = take_pending(state, QuantumChannel::GPrime);
    semiquantum_check(state, t);
  }
  BitString g_prime;
  for (auto& q : state.g_prime_qubits) {
    Measurement m = party_measure(Party::Charlie, q, 0, Basis::Z, state.rng);
    q = std::move(m.state);
    g_prime.push_back(m.bit);
  }
  state.transcript.add_measurement(Party::Charlie, to_string(QuantumOp::MeasureZ), "g'", g_prime.to_string());
  state.g_prime = g_prime;

  const BitString digest = keyed_hash(state.config.hash, state.keys.hash_secret, g_prime);
  const Verdict verdict = digest == state.hash_g ? Verdict::Valid : Verdict::Invalid;
  state.verdict = verdict;

  Json fields;
  fields["result"] = to_string(verdict);
  fields["g_prime"] = g_prime.to_string();
  state.transcript.append("verdict", fields);
  state.transcript.set_verdict({{"result", to_string(verdict)}});
  enter(state, Phase::Done);
  return verdict;
}

ProtocolState run_protocol(const RunConfig& config, const std::optional<AliceInputs>& inputs) {
  config.validate();
  // Initialization can itself abort during key establishment; keep a state to record it in.
  std::optional<ProtocolState> state;
  try {
    state.emplace(phase_initialize(config, inputs));
    phase_blind(*state);
    phase_sign(*state);
    phase_verify(*state);
  } catch (const ProtocolAbort& abort) {
    if (!state) {
      state.emplace(config);
      Json cfg = config.to_json();
      cfg["inputs"] = inputs ? "caller-supplied" : "derived";
      state->transcript.set_config(cfg);
    }
    Json fields;
    fields["reason"] = to_string(abort.reason());
    fields["detail"] = abort.detail();
    state->transcript.append("abort", fields);
    state->transcript.set_verdict({{"result", to_string(Verdict::Aborted)}, {"reason", to_string(abort.reason())}});
    state->verdict = Verdict::Aborted;
    enter(*state, Phase::Aborted);
  }
  return std::move(*state);
}

Transcript run_full(const RunConfig& config, const std::optional<AliceInputs>& inputs) {
  return run_protocol(config, inputs).transcript;
}

}  // namespace sqpbs
