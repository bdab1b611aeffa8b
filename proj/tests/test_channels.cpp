#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "sqpbs/channels.hpp"
#include "sqpbs/errors.hpp"

using namespace sqpbs;

namespace {

using Vec = Eigen::VectorXcd;

Vec unit(int dim, int k) {
  Vec v = Vec::Zero(dim);
  v[k] = 1;
  return v;
}

// Error probability per decoy computed from the coupling equations directly.
double decoy_error_oracle(const std::array<Complex, 4>& a, const std::array<Vec, 4>& e, DecoyState d) {
  switch (d) {
    case DecoyState::Zero: return std::norm(a[1]);
    case DecoyState::One: return std::norm(a[2]);
    case DecoyState::Plus: return (a[0] * e[0] + a[2] * e[2] - a[1] * e[1] - a[3] * e[3]).squaredNorm() / 4;
    case DecoyState::Minus: return (a[0] * e[0] - a[2] * e[2] + a[1] * e[1] - a[3] * e[3]).squaredNorm() / 4;
  }
  return -1;
}

std::vector<StateVector> payload_qubits(std::size_t n) {
  return std::vector<StateVector>(n, kets::zero());
}

std::vector<QubitRef> refs_of(std::vector<StateVector>& qs) {
  std::vector<QubitRef> out;
  for (auto& q : qs) out.push_back({&q, 0});
  return out;
}

}  // namespace

TEST(Decoys, StatesAndBases) {
  EXPECT_EQ(basis_of(DecoyState::Plus), Basis::X);
  EXPECT_EQ(bit_of(DecoyState::Minus), 1);
  EXPECT_NEAR(fidelity_up_to_phase(ket_of(DecoyState::Minus), kets::minus()), 1.0, 1e-15);
  EXPECT_STREQ(to_string(DecoyState::Plus), "+");
}

TEST(Send, RequiresDecoysAndInterleavesAll) {
  Rng rng(1);
  auto qs = payload_qubits(5);
  const auto refs = refs_of(qs);
  EXPECT_THROW(send_with_decoys("c", Party::Trent, Party::David, refs, 0, rng), std::invalid_argument);
  const Transmission t = send_with_decoys("c", Party::Trent, Party::David, refs, 3, rng);
  EXPECT_EQ(t.slots.size(), 8u);
  EXPECT_EQ(t.payload_count(), 5u);
  EXPECT_EQ(t.decoy_positions().size(), 3u);
  const auto order = t.payload_order();
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
}

// With 4 payload + 4 decoys every one of C(8,4) = 70 placements is equally likely.
TEST(Send, DecoyPlacementIsUniform) {
  Rng rng(2);
  auto qs = payload_qubits(4);
  const auto refs = refs_of(qs);
  std::map<unsigned, int> counts;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const Transmission t = send_with_decoys("c", Party::Trent, Party::David, refs, 4, rng);
    unsigned mask = 0;
    for (std::size_t p : t.decoy_positions()) mask |= 1u << p;
    ++counts[mask];
  }
  ASSERT_EQ(counts.size(), 70u);
  const double expected = trials / 70.0;
  double chi2 = 0;
  for (const auto& [m, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 111.0);  // 69 dof, p ~ 0.001
}

TEST(QuantumCheck, HonestPassesAndInterceptResendDisturbsQuarter) {
  Rng rng(3);
  auto qs = payload_qubits(2);
  const auto refs = refs_of(qs);
  Transmission honest = send_with_decoys("c", Party::Alice, Party::David, refs, 50, rng);
  const DecoyCheck ok = measure_decoys(honest, rng, 0.0);
  EXPECT_TRUE(ok.passed);
  EXPECT_EQ(ok.errors, 0u);

  InterceptResend eve(10);
  std::size_t errors = 0;
  std::size_t total = 0;
  for (int i = 0; i < 200; ++i) {
    Transmission t = send_with_decoys("c", Party::Alice, Party::David, refs, 20, rng, &eve);
    const DecoyCheck c = measure_decoys(t, rng, 1.0);
    errors += c.errors;
    total += c.decoys;
  }
  const double rate = static_cast<double>(errors) / static_cast<double>(total);
  EXPECT_NEAR(rate, 0.25, 4 * std::sqrt(0.25 * 0.75 / static_cast<double>(total)));

  Transmission t = send_with_decoys("c", Party::Alice, Party::David, refs, 40, rng, &eve);
  EXPECT_THROW(check_decoys(t, rng, 0.0), ProtocolAbort);
}

TEST(QuantumCheck, SemiquantumReceiverCannotMeasureX) {
  Rng rng(4);
  auto qs = payload_qubits(1);
  const auto refs = refs_of(qs);
  // 30 decoys: an all-Z draw has probability 2^-30.
  Transmission t = send_with_decoys("c", Party::Trent, Party::Bob, refs, 30, rng);
  EXPECT_THROW(measure_decoys(t, rng, 0.0), CapabilityError);
}

TEST(ReturnCheck, HonestPassesWithBothBranchesUsed) {
  Rng rng(5);
  auto qs = payload_qubits(3);
  const auto refs = refs_of(qs);
  Transmission t = send_with_decoys("W1", Party::Trent, Party::Bob, refs, 64, rng);
  const ReturnCheck c = semiquantum_return_check(t, rng, 0.0);
  EXPECT_TRUE(c.passed);
  EXPECT_GT(c.reflected_count, 0u);
  EXPECT_GT(c.z_sift_count, 0u);
  EXPECT_EQ(c.reflection_order.size(), c.reflected_count);
}

TEST(ReturnCheck, InterceptResendIsCaught) {
  Rng rng(6);
  auto qs = payload_qubits(3);
  const auto refs = refs_of(qs);
  InterceptResend eve(11);
  int aborted = 0;
  for (int i = 0; i < 200; ++i) {
    Transmission t = send_with_decoys("W4", Party::Trent, Party::Charlie, refs, 40, rng, &eve);
    aborted += !semiquantum_return_check(t, rng, 0.0).passed;
  }
  EXPECT_GE(aborted, 195);
}

TEST(ReturnCheck, QuantumReceiverMayAlsoReflect) {
  Rng rng(7);
  auto qs = payload_qubits(1);
  const auto refs = refs_of(qs);
  Transmission t = send_with_decoys("c", Party::Trent, Party::David, refs, 8, rng);
  EXPECT_TRUE(semiquantum_return_check(t, rng, 0.0).passed);
}

TEST(Eve, ParamsValidation) {
  const std::array<Complex, 4> a{1, 0, 0, 1};
  std::array<Vec, 4> e{unit(2, 0), unit(2, 0), unit(2, 0), unit(2, 0)};
  EXPECT_NO_THROW(EveParams::make(a, e));
  std::array<Complex, 4> bad{1, 1, 0, 1};
  EXPECT_THROW(EveParams::make(bad, e), std::invalid_argument);
  // Images not orthogonal: E|0> = |0>|e0>, E|1> = |0>|e0>.
  const std::array<Complex, 4> clash{1, 0, 1, 0};
  EXPECT_THROW(EveParams::make(clash, e), std::invalid_argument);
  std::array<Vec, 4> wide{unit(5, 0), unit(5, 0), unit(5, 0), unit(5, 0)};
  EXPECT_THROW(EveParams::make(a, wide), std::invalid_argument);
}

TEST(Eve, JointUnitaryIsUnitaryAndCouplesAsSpecified) {
  const double t = 0.3;
  const std::array<Complex, 4> a{std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
  Vec e01(3);
  e01 << 0, 1, 0;
  std::array<Vec, 4> e{unit(3, 0), e01, unit(3, 2), unit(3, 0)};
  const EveParams p = EveParams::make(a, e);
  EXPECT_EQ(p.probe_qubits(), 2);
  EXPECT_TRUE(is_unitary(p.joint_unitary()));
  StateVector reg = kets::zero();
  const auto probe = eve_entangle_measure(p, {&reg, 0});
  ASSERT_EQ(probe.size(), 2u);
  EXPECT_EQ(reg.num_qubits(), 3);
  // E|0>|e> = cos t |0>|00> + sin t |1>|01>.
  EXPECT_NEAR(std::abs(reg[0b000] - Complex(std::cos(t))), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(reg[0b101] - Complex(std::sin(t))), 0.0, 1e-12);
}

TEST(Eve, ExpectedErrorRateMatchesOracle) {
  Rng rng(8);
  auto random_unit = [&rng] {
    Vec v(2);
    v << Complex(rng.uniform() - 0.5, rng.uniform() - 0.5), Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    return Vec(v / v.norm());
  };
  for (int trial = 0; trial < 40; ++trial) {
    std::array<Complex, 4> a;
    std::array<Vec, 4> e;
    if (trial % 2 == 0) {
      // Rotation with shared probe states per output: images stay orthogonal.
      const double t = rng.uniform() * 1.5;
      a = {std::cos(t), std::sin(t), -std::sin(t), std::cos(t)};
      const Vec u = random_unit();
      const Vec v = random_unit();
      e = {u, v, u, v};
    } else {
      // No flips, arbitrary probe states.
      a = {1, 0, 0, 1};
      e = {random_unit(), random_unit(), random_unit(), random_unit()};
    }
    const EveParams p = EveParams::make(a, e);
    double mean = 0;
    for (DecoyState d : {DecoyState::Zero, DecoyState::One, DecoyState::Plus, DecoyState::Minus}) {
      const double ref = decoy_error_oracle(a, e, d);
      EXPECT_NEAR(decoy_disturbance(p, d), ref, 1e-12);
      mean += ref / 4;
    }
    EXPECT_NEAR(expected_decoy_error_rate(p), mean, 1e-12);
  }
}

TEST(Eve, TransparentCouplingIsUndetectableAndLearnsNothing) {
  Vec tau(2);
  tau << 0.6, Complex(0, 0.8);
  const EveParams p = EveParams::transparent(tau);
  EXPECT_TRUE(p.undetectable());
  EXPECT_NEAR(expected_decoy_error_rate(p), 0.0, 1e-15);
  const Operator ref = probe_state(p, DecoyState::Zero);
  for (DecoyState d : {DecoyState::One, DecoyState::Plus, DecoyState::Minus}) {
    EXPECT_LE(trace_distance(ref, probe_state(p, d)), 1e-10);
  }
}

// An orthogonal-probe Eve disturbs each X decoy with probability 1/2 and no Z decoy.
TEST(Eve, OrthogonalProbeDisturbsHalfOfXDecoys) {
  const std::array<Complex, 4> a{1, 0, 0, 1};
  const std::array<Vec, 4> e{unit(2, 0), unit(2, 1), unit(2, 0), unit(2, 1)};
  const EveParams p = EveParams::make(a, e);
  EXPECT_NEAR(decoy_disturbance(p, DecoyState::Zero), 0.0, 1e-14);
  EXPECT_NEAR(decoy_disturbance(p, DecoyState::Plus), 0.5, 1e-14);
  EXPECT_NEAR(expected_decoy_error_rate(p), 0.25, 1e-14);
  EXPECT_GT(trace_distance(probe_state(p, DecoyState::Zero), probe_state(p, DecoyState::One)), 0.99);
}

TEST(Classical, SendIsLogged) {
  Transcript log;
  const Receipt r = classical_send(Party::Bob, Party::Trent, "E", BitString::parse("101"), MessageCategory::Signature, log);
  EXPECT_EQ(r.seq, 0u);
  ASSERT_EQ(log.events().size(), 1u);
  EXPECT_EQ(log.events()[0].at("bits"), "101");
  EXPECT_EQ(log.events()[0].at("from"), "Bob");
}
