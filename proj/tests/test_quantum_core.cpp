#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "sqpbs/bit_string.hpp"
#include "sqpbs/rng.hpp"
#include "sqpbs/state_vector.hpp"

using namespace sqpbs;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

}  // namespace

TEST(StateVector, BasisIndexUsesQubitZeroAsMostSignificant) {
  const StateVector s = StateVector::basis(4, 5);  // |0101>
  EXPECT_EQ(s.dimension(), 16u);
  EXPECT_EQ(s[5], Complex(1, 0));
  EXPECT_EQ(outcome_probabilities(s, 0, Basis::Z)[0], 1.0);
  EXPECT_EQ(outcome_probabilities(s, 1, Basis::Z)[1], 1.0);
  EXPECT_EQ(outcome_probabilities(s, 3, Basis::Z)[1], 1.0);
}

TEST(StateVector, RejectsUnnormalizedAndOversized) {
  Amplitudes v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(StateVector(1, v), std::invalid_argument);
  EXPECT_THROW(StateVector::basis(9, 0), std::invalid_argument);
  EXPECT_THROW(StateVector(2, Amplitudes::Zero(2)), std::invalid_argument);
}

TEST(StateVector, TensorOrdersFirstOperandHigh) {
  const StateVector s = tensor(kets::one(), kets::zero());  // |10>
  EXPECT_NEAR(std::abs(s[2]), 1.0, 1e-15);
}

TEST(Gates, AreUnitaryAndActAsExpected) {
  for (const Operator& g : {gates::identity(), gates::pauli_x(), gates::i_pauli_y(), gates::pauli_z(), gates::hadamard()}) {
    EXPECT_TRUE(is_unitary(g));
  }
  EXPECT_NEAR(fidelity_up_to_phase(apply_unitary(kets::zero(), 0, gates::hadamard()), kets::plus()), 1.0, 1e-14);
  // i sigma_y = |0><1| - |1><0|: |0> -> -|1>, |1> -> |0>.
  const StateVector y0 = apply_unitary(kets::zero(), 0, gates::i_pauli_y());
  EXPECT_NEAR(y0[1].real(), -1.0, 1e-15);
  const StateVector y1 = apply_unitary(kets::one(), 0, gates::i_pauli_y());
  EXPECT_NEAR(y1[0].real(), 1.0, 1e-15);
}

TEST(ApplyUnitary, RejectsNonUnitary) {
  Operator m = Operator::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(apply_unitary(kets::zero(), 0, m), std::invalid_argument);
}

TEST(ApplyUnitary, FirstTargetIsMostSignificant) {
  // CNOT with control = first target.
  Operator cnot = Operator::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
  const StateVector s = tensor(tensor(kets::zero(), kets::one()), kets::zero());  // |010>
  const int forward[] = {1, 2};
  EXPECT_NEAR(std::abs(apply_unitary(s, forward, cnot)[0b011]), 1.0, 1e-15);
  const int reverse[] = {2, 1};
  EXPECT_NEAR(std::abs(apply_unitary(s, reverse, cnot)[0b010]), 1.0, 1e-15);
}

TEST(Measure, CollapsesAndMatchesBornRule) {
  Rng rng(11);
  const StateVector psi = kets::qubit(std::sqrt(0.3), std::sqrt(0.7));
  int ones = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    const Measurement m = measure(psi, 0, Basis::Z, rng);
    ones += m.bit;
    EXPECT_NEAR(outcome_probabilities(m.state, 0, Basis::Z)[static_cast<std::size_t>(m.bit)], 1.0, 1e-12);
  }
  const double sigma = std::sqrt(0.7 * 0.3 / trials);
  EXPECT_NEAR(ones / static_cast<double>(trials), 0.7, 4 * sigma);
}

TEST(Measure, XBasisEigenstatesAreDeterministic) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(measure(kets::plus(), 0, Basis::X, rng).bit, 0);
    EXPECT_EQ(measure(kets::minus(), 0, Basis::X, rng).bit, 1);
  }
}

TEST(Bell, KetsAreOrthonormalAndBitsFollowEncoding) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double overlap =
          fidelity_up_to_phase(bell_ket(static_cast<BellState>(i)), bell_ket(static_cast<BellState>(j)));
      EXPECT_NEAR(overlap, i == j ? 1.0 : 0.0, 1e-14);
    }
  }
  const BellOutcome psi_minus{BellState::PsiMinus};
  EXPECT_EQ(psi_minus.high_bit(), 1);
  EXPECT_EQ(psi_minus.low_bit(), 1);
  EXPECT_EQ(BellOutcome::from_bits(0, 1).variant, BellState::PhiMinus);
  const StateVector phi_plus = bell_ket(BellState::PhiPlus);
  EXPECT_NEAR(phi_plus[0].real(), kS, 1e-15);
  EXPECT_NEAR(phi_plus[3].real(), kS, 1e-15);
}

TEST(Bell, MeasurementIdentifiesBellStates) {
  Rng rng(5);
  for (int i = 0; i < 4; ++i) {
    const auto which = static_cast<BellState>(i);
    // Embed in a 3-qubit register with the pair on qubits (2, 0).
    const StateVector pair = bell_ket(which);
    Amplitudes amp = Amplitudes::Zero(8);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) amp[(b << 2) | (1 << 1) | a] = pair[static_cast<std::size_t>(2 * a + b)];
    }
    const StateVector reg(3, amp);
    EXPECT_EQ(measure_bell(reg, 2, 0, rng).outcome.variant, which);
    EXPECT_NEAR(project_bell(reg, 2, 0, which).probability, 1.0, 1e-14);
  }
}

TEST(Projection, ZeroProbabilityBranchHasNoState) {
  const Projection p = project(kets::zero(), 0, Basis::Z, 1);
  EXPECT_NEAR(p.probability, 0.0, 1e-15);
  EXPECT_FALSE(p.state.has_value());
}

TEST(Fidelity, IgnoresGlobalPhase) {
  const StateVector a = kets::qubit(kS, Complex(0, kS));
  const StateVector b = kets::qubit(Complex(0, kS), -kS);
  EXPECT_NEAR(fidelity_up_to_phase(a, b), 1.0, 1e-14);
}

TEST(FactorOut, ProductAndEntangled) {
  const StateVector prod = tensor(kets::plus(), kets::one());
  const auto q0 = factor_out_qubit(prod, 0);
  ASSERT_TRUE(q0.has_value());
  EXPECT_NEAR(fidelity_up_to_phase(*q0, kets::plus()), 1.0, 1e-14);
  EXPECT_FALSE(factor_out_qubit(bell_ket(BellState::PsiMinus), 0).has_value());
  EXPECT_NEAR(qubit_fidelity(bell_ket(BellState::PhiPlus), 1, kets::zero()), 0.5, 1e-14);
}

TEST(DensityMatrix, ReducedBellIsMaximallyMixedAndTraceDistance) {
  const int q[] = {0};
  const Operator rho = reduced_density_matrix(bell_ket(BellState::PhiMinus), q);
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-14);
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.0, 1e-14);
  const Operator zero = reduced_density_matrix(kets::zero(), q);
  const Operator one = reduced_density_matrix(kets::one(), q);
  EXPECT_NEAR(trace_distance(zero, one), 1.0, 1e-14);
  EXPECT_NEAR(trace_distance(zero, rho), 0.5, 1e-14);
  const Operator plus = reduced_density_matrix(kets::plus(), q);
  EXPECT_NEAR(trace_distance(zero, plus), kS, 1e-14);
}

TEST(Rng, DeterministicPerSeedAndStreamsDiffer) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(Rng::derive(42, 0), Rng::derive(42, 1));
  EXPECT_NE(Rng::derive(42, 0), Rng::derive(43, 0));
  EXPECT_EQ(Rng::derive(42, 7), Rng::derive(42, 7));
}

TEST(Rng, BelowAndUniformStayInRange) {
  Rng rng(1);
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < 60000; ++i) {
    const auto v = rng.below(6);
    ASSERT_LT(v, 6u);
    ++counts[v];
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (const auto& [v, c] : counts) EXPECT_NEAR(c, 10000, 5 * std::sqrt(10000 * 5.0 / 6.0));
  EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(Rng, PermutationAndSubsetMask) {
  Rng rng(9);
  auto perm = random_permutation(10, rng);
  std::sort(perm.begin(), perm.end());
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(perm[i], i);
  const auto mask = random_subset_mask(12, 5, rng);
  EXPECT_EQ(std::count(mask.begin(), mask.end(), true), 5);
}

TEST(BitString, ParseXorAndPack) {
  const BitString a = BitString::parse("101");
  const BitString b = BitString::parse("011");
  EXPECT_EQ((a ^ b).to_string(), "110");
  EXPECT_EQ(a.count_ones(), 2u);
  EXPECT_EQ(a.hamming_distance(b), 2u);
  EXPECT_THROW(a ^ BitString::parse("1"), std::invalid_argument);
  EXPECT_THROW(BitString::parse("10x"), std::invalid_argument);
  const auto bytes = BitString::parse("100000011").pack();
  ASSERT_EQ(bytes.size(), 2u);
  EXPECT_EQ(bytes[0], 0x81);
  EXPECT_EQ(bytes[1], 0x80);
  EXPECT_EQ(BitString::parse("1100").slice(1, 2).to_string(), "10");
}
