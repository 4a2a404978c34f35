// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

#include "weyl/errors.hpp"

namespace weyl {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = kPi / 2.0;
inline constexpr double kQuarterPi = kPi / 4.0;

/// Default unitarity tolerance: max-norm of U†U - I.
inline constexpr double kUnitaryTol = 1e-10;
/// Default equality tolerance for matrix and coordinate comparisons.
inline constexpr double kEqTol = 1e-9;

inline constexpr Complex kImag{0.0, 1.0};

inline Complex phase_factor(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

/// Pauli matrix for axis 1, 2 or 3 (x, y, z).
inline const Mat2& pauli(int axis) {
  static const Mat2 sx = (Mat2() << 0, 1, 1, 0).finished();
  static const Mat2 sy = (Mat2() << 0, -kImag, kImag, 0).finished();
  static const Mat2 sz = (Mat2() << 1, 0, 0, -1).finished();
  switch (axis) {
    case 1:
      return sx;
    case 2:
      return sy;
    case 3:
      return sz;
    default:
      throw DomainError("pauli: axis must be 1, 2 or 3");
  }
}

template <typename Mat>
bool is_finite(const Mat& m) {
  return m.allFinite();
}

template <typename Mat>
bool is_unitary(const Mat& m, double tol = kUnitaryTol) {
  if (!m.allFinite()) return false;
  const Mat residue = m.adjoint() * m - Mat::Identity();
  return residue.cwiseAbs().maxCoeff() <= tol;
}

template <typename Mat>
void require_unitary(const Mat& m, double tol = kUnitaryTol,
                     const char* what = "matrix") {
  if (!is_unitary(m, tol)) {
    throw NonUnitaryInput(std::string(what) + " is not unitary within tolerance");
  }
}

template <typename MatA, typename MatB>
double max_abs_diff(const MatA& a, const MatB& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Kronecker product with qubit A as the left (most significant) factor.
inline Mat4 tensor(const Mat2& a, const Mat2& b) {
  return Eigen::kroneckerProduct(a, b);
}

/// A pair of single-qubit gates applied as a ⊗ b.
struct LocalLayer {
  Mat2 a = Mat2::Identity();
  Mat2 b = Mat2::Identity();

  Mat4 matrix() const { return tensor(a, b); }
  LocalLayer adjoint() const { return {a.adjoint(), b.adjoint()}; }
  /// Layer with the roles of the two qubits exchanged.
  LocalLayer swapped() const { return {b, a}; }
};

/// Composition "after ∘ before": the layer equal to applying `before` first.
inline LocalLayer compose(const LocalLayer& after, const LocalLayer& before) {
  return {after.a * before.a, after.b * before.b};
}

inline LocalLayer identity_layer() { return {}; }

/// exp(i(θ/2)σx).
inline Mat2 rot_x(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Mat2 m;
  m << Complex{c, 0}, Complex{0, s}, Complex{0, s}, Complex{c, 0};
  return m;
}

/// exp(i(θ/2)σy).
inline Mat2 rot_y(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Mat2 m;
  m << Complex{c, 0}, Complex{s, 0}, Complex{-s, 0}, Complex{c, 0};
  return m;
}

/// exp(i(θ/2)σz).
inline Mat2 rot_z(double theta) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = phase_factor(theta / 2.0);
  m(1, 1) = phase_factor(-theta / 2.0);
  return m;
}

inline Mat2 rot(int axis, double theta) {
  switch (axis) {
    case 1:
      return rot_x(theta);
    case 2:
      return rot_y(theta);
    case 3:
      return rot_z(theta);
    default:
      throw DomainError("rot: axis must be 1, 2 or 3");
  }
}

/// The fixed phased-Bell change of basis. Columns are the four magic states
/// in the computational basis |00⟩,|01⟩,|10⟩,|11⟩:
///   col 1: (1,0,0,1)/√2     col 2: (0,i,i,0)/√2
///   col 3: (0,1,-1,0)/√2    col 4: (i,0,0,-i)/√2
/// Every canonical gate is diagonal in this basis, and single-qubit layers
/// with unit determinant become real orthogonal matrices.
inline const Mat4& magic_basis() {
  static const Mat4 q = [] {
    const double r = 1.0 / std::sqrt(2.0);
    Mat4 m = Mat4::Zero();
    m(0, 0) = r;
    m(3, 0) = r;
    m(1, 1) = kImag * r;
    m(2, 1) = kImag * r;
    m(1, 2) = r;
    m(2, 2) = -r;
    m(0, 3) = kImag * r;
    m(3, 3) = -kImag * r;
    return m;
  }();
  return q;
}

/// j-th magic state, j in 1..4.
inline Vec4 magic_state(int j) {
  if (j < 1 || j > 4) throw DomainError("magic_state: index must be 1..4");
  return magic_basis().col(j - 1);
}

/// Eigenphases of the canonical gate on the four magic states.
inline std::array<double, 4> canonical_eigenphases(double c1, double c2,
                                                   double c3) {
  return {c1 - c2 + c3, c1 + c2 - c3, -c1 - c2 - c3, -c1 + c2 + c3};
}

/// exp(i(c1·σx⊗σx + c2·σy⊗σy + c3·σz⊗σz)), evaluated in closed form by
/// diagonalizing in the magic basis. The coordinates may be arbitrary reals.
inline Mat4 canonical_gate(double c1, double c2, double c3) {
  const auto lam = canonical_eigenphases(c1, c2, c3);
  Mat4 d = Mat4::Zero();
  for (int j = 0; j < 4; ++j) d(j, j) = phase_factor(lam[j]);
  const Mat4& q = magic_basis();
  return q * d * q.adjoint();
}

/// exp(i(γ/2)σz⊗σz) = diag(e^{iγ/2}, e^{-iγ/2}, e^{-iγ/2}, e^{iγ/2}).
inline Mat4 controlled_gate(double gamma) {
  Mat4 m = Mat4::Zero();
  const Complex p = phase_factor(gamma / 2.0);
  m(0, 0) = p;
  m(1, 1) = std::conj(p);
  m(2, 2) = std::conj(p);
  m(3, 3) = p;
  return m;
}

inline const Mat4& swap_gate() {
  static const Mat4 s = [] {
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1;
    m(1, 2) = 1;
    m(2, 1) = 1;
    m(3, 3) = 1;
    return m;
  }();
  return s;
}

/// 1 - |tr(u†v)|/4. Zero iff u and v agree up to a global phase.
inline double distance_up_to_phase(const Mat4& u, const Mat4& v) {
  return 1.0 - std::abs((u.adjoint() * v).trace()) / 4.0;
}

using Rng = std::mt19937_64;

namespace detail {

template <typename Mat>
Mat haar_random_unitary(Rng& rng) {
  // Ginibre ensemble followed by QR with the phase-fixed diagonal.
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat z;
  for (int r = 0; r < Mat::RowsAtCompileTime; ++r) {
    for (int c = 0; c < Mat::ColsAtCompileTime; ++c) {
      z(r, c) = Complex{gauss(rng), gauss(rng)};
    }
  }
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int c = 0; c < Mat::ColsAtCompileTime; ++c) {
    q.col(c) *= r(c, c) / std::abs(r(c, c));
  }
  return q;
}

}  // namespace detail

inline Mat2 haar_random_u2(Rng& rng) {
  return detail::haar_random_unitary<Mat2>(rng);
}

inline Mat4 haar_random_u4(Rng& rng) {
  return detail::haar_random_unitary<Mat4>(rng);
}

inline Mat2 haar_random_u2(std::uint64_t seed) {
  Rng rng(seed);
  return haar_random_u2(rng);
}

inline Mat4 haar_random_u4(std::uint64_t seed) {
  Rng rng(seed);
  return haar_random_u4(rng);
}

/// Deterministic seed splitting (splitmix64 of master + index). Parallel and
/// serial sweeps derive identical per-trial generators from the master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace weyl
