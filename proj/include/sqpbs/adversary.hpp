#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "sqpbs/rng.hpp"
#include "sqpbs/state_vector.hpp"

namespace sqpbs {

/// A qubit in flight: the register that holds it and its index there.
struct QubitRef {
  StateVector* reg;
  int qubit;
};

/// Eve's coupling of a transmitted qubit to her probe:
///   E|0>|e> = alpha_00 |0>|eps_00> + alpha_01 |1>|eps_01>
///   E|1>|e> = alpha_10 |0>|eps_10> + alpha_11 |1>|eps_11>
/// Probe vectors live in C^d, d <= 4, padded to whole qubits. The initial
/// probe |e> is the first probe basis vector.
class EveParams {
 public:
  static constexpr double kTolerance = 1e-10;

  /// Index order for alpha/eps is 00, 01, 10, 11. Throws std::invalid_argument
  /// when normalization fails or the two image states are not orthonormal.
  static EveParams make(const std::array<Complex, 4>& alpha, const std::array<Amplitudes, 4>& eps);

  /// alpha_01 = alpha_10 = 0 and alpha_00 eps_00 = alpha_11 eps_11 = tau.
  static EveParams transparent(const Amplitudes& tau);

  const std::array<Complex, 4>& alpha() const { return alpha_; }
  const std::array<Amplitudes, 4>& eps() const { return eps_; }
  int probe_dimension() const { return static_cast<int>(eps_[0].size()); }
  int probe_qubits() const { return probe_qubits_; }

  /// Unitary on (qubit, probe qubits), qubit most significant.
  const Operator& joint_unitary() const { return unitary_; }

  /// sqrt(|alpha_01|^2 + |alpha_10|^2 + ||alpha_00 eps_00 - alpha_11 eps_11||^2);
  /// zero exactly on the undetectable family.
  double constraint_residual() const;
  bool undetectable(double tolerance = kTolerance) const { return constraint_residual() <= tolerance; }

 private:
  EveParams() = default;

  std::array<Complex, 4> alpha_{};
  std::array<Amplitudes, 4> eps_{};
  int probe_qubits_ = 0;
  Operator unitary_;
};

/// Hook invoked on every qubit that crosses an attacked quantum channel.
class Adversary {
 public:
  explicit Adversary(std::uint64_t seed) : rng_(seed) {}
  virtual ~Adversary() = default;

  virtual std::string kind() const = 0;
  virtual void intercept(QubitRef target) = 0;

  std::size_t intercepted() const { return intercepted_; }

 protected:
  Rng rng_;
  std::size_t intercepted_ = 0;
};

/// Measures each qubit in a uniformly random Z/X basis and resends the result.
class InterceptResend final : public Adversary {
 public:
  using Adversary::Adversary;
  std::string kind() const override { return "intercept-resend"; }
  void intercept(QubitRef target) override;
};

/// Measures every qubit in one fixed basis and resends the result.
class FixedBasisMeasure final : public Adversary {
 public:
  FixedBasisMeasure(std::uint64_t seed, Basis basis) : Adversary(seed), basis_(basis) {}
  std::string kind() const override { return basis_ == Basis::Z ? "measure-z" : "measure-x"; }
  void intercept(QubitRef target) override;

 private:
  Basis basis_;
};

/// Appends a fresh probe to the qubit's register and applies the joint unitary.
class EntangleMeasure final : public Adversary {
 public:
  EntangleMeasure(std::uint64_t seed, EveParams params) : Adversary(seed), params_(std::move(params)) {}
  std::string kind() const override { return "entangle-measure"; }
  void intercept(QubitRef target) override;

  const EveParams& params() const { return params_; }

 private:
  EveParams params_;
};

/// Applies the coupling to `target`, returning the register indices of the new probe qubits.
std::vector<int> eve_entangle_measure(const EveParams& params, QubitRef target);

}  // namespace sqpbs
