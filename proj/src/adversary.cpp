#include "sqpbs/adversary.hpp"

#include <cmath>
#include <stdexcept>


namespace sqpbs {

EveParams EveParams::make(const std::array<Complex, 4>& alpha, const std::array<Amplitudes, 4>& eps) {
  const auto d = eps[0].size();
  if (d < 1 || d > 4) throw std::invalid_argument("probe dimension must be between 1 and 4");
  for (const auto& e : eps) {
    if (e.size() != d) throw std::invalid_argument("probe vectors must share one dimension");
    if (std::abs(e.squaredNorm() - 1.0) > kTolerance) throw std::invalid_argument("probe vectors must be unit vectors");
  }
  if (std::abs(std::norm(alpha[0]) + std::norm(alpha[1]) - 1.0) > kTolerance ||
      std::abs(std::norm(alpha[2]) + std::norm(alpha[3]) - 1.0) > kTolerance) {
    throw std::invalid_argument("Eve coefficients violate |a00|^2+|a01|^2 = |a10|^2+|a11|^2 = 1");
  }

  EveParams p;
  p.alpha_ = alpha;
  p.probe_qubits_ = d <= 1 ? 0 : (d <= 2 ? 1 : 2);
  const Eigen::Index padded = Eigen::Index{1} << p.probe_qubits_;
  for (std::size_t i = 0; i < 4; ++i) {
    p.eps_[i] = Amplitudes::Zero(padded);
    p.eps_[i].head(d) = eps[i];
  }

  const Eigen::Index dim = 2 * padded;
  Amplitudes image0 = Amplitudes::Zero(dim);
  Amplitudes image1 = Amplitudes::Zero(dim);
  image0.head(padded) = alpha[0] * p.eps_[0];
  image0.tail(padded) = alpha[1] * p.eps_[1];
  image1.head(padded) = alpha[2] * p.eps_[2];
  image1.tail(padded) = alpha[3] * p.eps_[3];
  if (std::abs(image0.dot(image1)) > kTolerance) {
    throw std::invalid_argument("Eve's images of |0>|e> and |1>|e> are not orthogonal; no unitary realizes them");
  }

  // Complete the two prescribed columns to a unitary by Gram-Schmidt.
  std::vector<Amplitudes> columns{image0, image1};
  for (Eigen::Index k = 0; k < dim && static_cast<Eigen::Index>(columns.size()) < dim; ++k) {
    Amplitudes v = Amplitudes::Unit(dim, k);
    for (const auto& c : columns) v -= c.dot(v) * c;
    const double n = v.norm();
    if (n > 1e-8) columns.push_back(v / n);
  }
  p.unitary_ = Operator::Zero(dim, dim);
  p.unitary_.col(0) = columns[0];
  p.unitary_.col(padded) = columns[1];
  std::size_t next = 2;
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (c == 0 || c == padded) continue;
    p.unitary_.col(c) = columns[next++];
  }
  return p;
}

EveParams EveParams::transparent(const Amplitudes& tau) {
  Amplitudes other = Amplitudes::Zero(tau.size());
  other[0] = 1.0;
  return make({Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}}, {tau, other, other, tau});
}

double EveParams::constraint_residual() const {
  const double cross = std::norm(alpha_[1]) + std::norm(alpha_[2]);
  const double mismatch = (alpha_[0] * eps_[0] - alpha_[3] * eps_[3]).squaredNorm();
  return std::sqrt(cross + mismatch);
}

void InterceptResend::intercept(QubitRef target) {
  ++intercepted_;
  const Basis basis = rng_.bit() ? Basis::X : Basis::Z;
  // The collapsed qubit is exactly the state Eve resends.
  *target.reg = measure(*target.reg, target.qubit, basis, rng_).state;
}

void FixedBasisMeasure::intercept(QubitRef target) {
  ++intercepted_;
  *target.reg = measure(*target.reg, target.qubit, basis_, rng_).state;
}

void EntangleMeasure::intercept(QubitRef target) {
  ++intercepted_;
  eve_entangle_measure(params_, target);
}

std::vector<int> eve_entangle_measure(const EveParams& params, QubitRef target) {
  StateVector& reg = *target.reg;
  const int first_probe = reg.num_qubits();
  if (params.probe_qubits() > 0) reg = tensor(reg, StateVector::basis(params.probe_qubits(), 0));
  std::vector<int> targets{target.qubit};
  std::vector<int> probe;
  for (int k = 0; k < params.probe_qubits(); ++k) {
    targets.push_back(first_probe + k);
    probe.push_back(first_probe + k);
  }
  reg = apply_unitary(reg, targets, params.joint_unitary());
  return probe;
}

}  // namespace sqpbs
