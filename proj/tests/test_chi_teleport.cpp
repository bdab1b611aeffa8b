#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sqpbs/chi_teleport.hpp"

using namespace sqpbs;

namespace {

MessageQubit random_message(Rng& rng) {
  const double p = rng.uniform();
  return MessageQubit::make(std::polar(std::sqrt(p), 2 * std::numbers::pi * rng.uniform()),
                            std::polar(std::sqrt(1 - p), 2 * std::numbers::pi * rng.uniform()));
}

}  // namespace

TEST(Chi, AmplitudesMatchListedKets) {
  const StateVector chi = prepare_chi();
  const oracle::Vec ref = oracle::chi();
  ASSERT_EQ(chi.num_qubits(), 4);
  for (int k = 0; k < 16; ++k) EXPECT_NEAR(std::abs(chi[static_cast<std::size_t>(k)] - ref[k]), 0.0, 1e-12) << k;
}

TEST(Chi, TeleportRegisterLayout) {
  const MessageQubit m = MessageQubit::make(0.6, Complex(0, 0.8));
  const StateVector reg = prepare_teleport_register(m);
  const oracle::Vec ref = oracle::message_register(m.a, m.b);
  ASSERT_EQ(reg.num_qubits(), chi_qubit::kCount);
  for (int k = 0; k < 32; ++k) EXPECT_NEAR(std::abs(reg[static_cast<std::size_t>(k)] - ref[k]), 0.0, 1e-12);
  EXPECT_EQ(qubit_for_role(ChiRole::Sender), chi_qubit::kParticle2);
  EXPECT_EQ(qubit_for_role(ChiRole::Receiver), chi_qubit::kParticle3);
}

TEST(MessageQubit, RejectsUnnormalized) {
  EXPECT_THROW(MessageQubit::make(1.0, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(MessageQubit::make(1.0, 0.0));
}

TEST(Outcomes, IndexRoundTrip) {
  for (int i = 0; i < 16; ++i) EXPECT_EQ(TeleportOutcomes::from_index(i).index(), i);
  const auto all = TeleportOutcomes::all();
  EXPECT_EQ(all[5], TeleportOutcomes::from_index(5));
}

// Every correction in the table is one of the Paulis that the independent
// projection oracle finds recovers the message, for random complex (a, b).
TEST(Table, CorrectionsAgreeWithProjectionOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const MessageQubit m = random_message(rng);
    for (const TeleportOutcomes& o : TeleportOutcomes::all()) {
      const auto u = oracle::particle3(oracle::message_register(m.a, m.b), o.z1, static_cast<int>(o.bell_m2.variant), o.z4);
      EXPECT_NEAR(std::norm(u[0]) + std::norm(u[1]), 1.0 / 16, 1e-12) << o.describe();
      const auto ok = oracle::recovering(m.a, m.b, o.z1, static_cast<int>(o.bell_m2.variant), o.z4);
      EXPECT_TRUE(ok[static_cast<std::size_t>(correction_for(o))]) << o.describe();
    }
  }
}

// For a generic message exactly one Pauli recovers each branch.
TEST(Table, CorrectionIsUniqueForGenericMessage) {
  const MessageQubit m = MessageQubit::make(0.6, Complex(0.48, 0.64));
  for (const TeleportOutcomes& o : TeleportOutcomes::all()) {
    const auto ok = oracle::recovering(m.a, m.b, o.z1, static_cast<int>(o.bell_m2.variant), o.z4);
    EXPECT_EQ(std::count(ok.begin(), ok.end(), true), 1) << o.describe();
  }
}

TEST(Table, CollapsedStatesMatchOracle) {
  const MessageQubit m = MessageQubit::make(0.28, Complex(0.0, 0.96));
  for (const TeleportOutcomes& o : TeleportOutcomes::all()) {
    auto u = oracle::particle3(oracle::message_register(m.a, m.b), o.z1, static_cast<int>(o.bell_m2.variant), o.z4);
    const double norm = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
    const StateVector listed = collapsed_state_for(o, m);
    const double overlap = std::norm(std::conj(listed[0]) * u[0] / norm + std::conj(listed[1]) * u[1] / norm);
    EXPECT_NEAR(overlap, 1.0, 1e-12) << o.describe();
  }
}

// The corrected particle equals the message up to a global phase of +1 or -1.
TEST(Table, RecoveredPhaseMatchesOracle) {
  Rng rng(77);
  const MessageQubit m = random_message(rng);
  const Table1Report r = oracle_verify_table1(m);
  for (const BranchReport& b : r.branches) {
    const TeleportOutcomes& o = b.outcomes;
    const auto u = oracle::particle3(oracle::message_register(m.a, m.b), o.z1, static_cast<int>(o.bell_m2.variant), o.z4);
    const auto w = oracle::act(oracle::pauli(static_cast<int>(correction_for(o))), u);
    const oracle::C inner = std::conj(m.a) * w[0] + std::conj(m.b) * w[1];
    const oracle::C phase = inner / std::abs(inner);
    EXPECT_NEAR(std::abs(phase.imag()), 0.0, 1e-10) << o.describe();
    EXPECT_NEAR(std::abs(b.recovered_phase - phase), 0.0, 1e-10) << o.describe();
  }
}

TEST(Table, SpotEntries) {
  EXPECT_EQ(correction_for({0, {BellState::PhiPlus}, 0}), Pauli::I);
  const auto ok = oracle::recovering(0.6, 0.8, 0, 0, 0);
  EXPECT_TRUE(ok[0]);
}

TEST(OracleVerify, PassesForBasisAndRandomMessages) {
  EXPECT_TRUE(oracle_verify_table1(MessageQubit::make(1.0, 0.0)).passed);
  EXPECT_TRUE(oracle_verify_table1(MessageQubit::make(0.0, 1.0)).passed);
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const Table1Report r = oracle_verify_table1(random_message(rng));
    EXPECT_TRUE(r.passed) << r.failure;
    for (const BranchReport& b : r.branches) {
      EXPECT_NEAR(b.probability, 1.0 / 16, 1e-12);
      EXPECT_TRUE(b.order_independent);
    }
  }
}

TEST(OracleVerify, CorruptedLookupNamesTheBranch) {
  const auto bad = TeleportOutcomes::from_index(9);
  const CorrectionLookup lookup = [&](const TeleportOutcomes& o) {
    return o == bad ? (correction_for(o) == Pauli::I ? Pauli::SigmaZ : Pauli::I) : correction_for(o);
  };
  const Table1Report r = oracle_verify_table1(MessageQubit::make(0.6, Complex(0.0, 0.8)), lookup);
  EXPECT_FALSE(r.passed);
  EXPECT_NE(r.failure.find(bad.describe()), std::string::npos) << r.failure;
  for (const BranchReport& b : r.branches) EXPECT_EQ(b.passed, !(b.outcomes == bad));
}

TEST(Teleportation, SampledRunsRecoverTheMessage) {
  Rng rng(77);
  std::array<int, 16> seen{};
  for (int i = 0; i < 800; ++i) {
    const MessageQubit m = random_message(rng);
    const TeleportRun run = run_teleportation(m, rng);
    ++seen[static_cast<std::size_t>(run.outcomes.index())];
    EXPECT_NEAR(fidelity_up_to_phase(run.recovered, prepare_message(m)), 1.0, 1e-10);
  }
  for (int c : seen) EXPECT_GT(c, 20);
}
