#pragma once

// Reference computations written directly against Eigen, sharing no code with
// the library's simulator. Register order is (m, 1, 2, 3, 4), m most significant.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

namespace oracle {

using C = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::Matrix2cd;

inline const double kR = 1.0 / (2.0 * std::sqrt(2.0));

// |chi00>_{1234} from its eight listed kets.
inline Vec chi() {
  Vec v = Vec::Zero(16);
  for (int k : {0b0000, 0b0011, 0b0110, 0b1001, 0b1010, 0b1100}) v[k] = kR;
  for (int k : {0b0101, 0b1111}) v[k] = -kR;
  return v;
}

inline Vec message_register(C a, C b) {
  const Vec c = chi();
  Vec v(32);
  for (int k = 0; k < 16; ++k) {
    v[k] = a * c[k];
    v[16 + k] = b * c[k];
  }
  return v;
}

// Bell kets on (first, second), index 2*first + second; order phi+, phi-, psi+, psi-.
inline std::array<C, 4> bell(int which) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (which) {
    case 0: return {s, 0, 0, s};
    case 1: return {s, 0, 0, -s};
    case 2: return {0, s, s, 0};
    default: return {0, s, -s, 0};
  }
}

inline int bit(int index, int qubit) { return (index >> (4 - qubit)) & 1; }

// Unnormalized particle-3 state after Z1 = z1, Bell(m,2) = which, Z4 = z4.
inline std::array<C, 2> particle3(const Vec& reg, int z1, int which, int z4) {
  const auto b = bell(which);
  std::array<C, 2> out{0, 0};
  for (int k = 0; k < 32; ++k) {
    if (bit(k, 1) != z1 || bit(k, 4) != z4) continue;
    out[bit(k, 3)] += std::conj(b[2 * bit(k, 0) + bit(k, 2)]) * reg[k];
  }
  return out;
}

inline Mat pauli(int p) {
  Mat m;
  switch (p) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, 1, -1, 0; break;  // i sigma_y
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline double fidelity(const std::array<C, 2>& u, C a, C b) {
  const double nu = std::norm(u[0]) + std::norm(u[1]);
  return std::norm(std::conj(a) * u[0] + std::conj(b) * u[1]) / nu;
}

inline std::array<C, 2> act(const Mat& m, const std::array<C, 2>& v) {
  return {m(0, 0) * v[0] + m(0, 1) * v[1], m(1, 0) * v[0] + m(1, 1) * v[1]};
}

// Paulis (0..3) that map the branch's particle 3 back to a|0> + b|1>.
inline std::array<bool, 4> recovering(C a, C b, int z1, int which, int z4) {
  const auto u = particle3(message_register(a, b), z1, which, z4);
  std::array<bool, 4> ok{};
  for (int p = 0; p < 4; ++p) ok[p] = std::abs(fidelity(act(pauli(p), u), a, b) - 1.0) < 1e-10;
  return ok;
}

}  // namespace oracle
