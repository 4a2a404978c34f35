// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "weyl/matcore.hpp"

namespace weyl {

/// Canonical coordinates of a two-qubit gate. When normalized they satisfy
/// the chamber bounds π/4 ≥ c1 ≥ c2 ≥ |c3| ≥ 0.
struct CanonicalCoords {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  bool in_chamber(double slack = 1e-12) const {
    return c1 <= kQuarterPi + slack && c2 <= c1 + slack &&
           std::abs(c3) <= c2 + slack && c2 >= -slack;
  }
  double max_abs_diff(const CanonicalCoords& o) const {
    return std::max({std::abs(c1 - o.c1), std::abs(c2 - o.c2),
                     std::abs(c3 - o.c3)});
  }
};

/// Result of bringing raw coordinates into the Weyl chamber:
///   canonical_gate(raw) = e^{i·phase} · post · canonical_gate(coords) · pre.
struct NormalizedCanonical {
  CanonicalCoords coords;
  LocalLayer pre;
  LocalLayer post;
  double phase = 0.0;
};

/// Full canonical decomposition of a two-qubit gate:
///   u = e^{i·phase} · (post.a ⊗ post.b) · canonical_gate(coords) ·
///       (pre.a ⊗ pre.b),
/// with coords normalized and all four local factors of unit determinant.
struct KakDecomposition {
  double phase = 0.0;
  LocalLayer pre;
  CanonicalCoords coords;
  LocalLayer post;

  Mat4 reconstruct() const {
    return phase_factor(phase) * post.matrix() *
           canonical_gate(coords.c1, coords.c2, coords.c3) * pre.matrix();
  }
};

namespace detail {

inline double wrap_pi(double x) {
  // into (-π, π]
  x = std::fmod(x, 2.0 * kPi);
  if (x <= -kPi) x += 2.0 * kPi;
  if (x > kPi) x -= 2.0 * kPi;
  return x;
}

/// Diagonalize a unitary complex-symmetric matrix m over a real orthogonal
/// eigenbasis: returns (p, mu) with p ∈ SO(4) and pᵀ m p = diag(mu).
///
/// Degenerate eigenvalues (identity, CNOT, SWAP classes) make individual
/// complex eigenvectors useless; instead diagonalize a generic real linear
/// combination of Re(m) and Im(m), which commute, and retry with fresh
/// coefficients until the residual check passes.
inline std::pair<Eigen::Matrix4d, Vec4> diagonalize_unitary_symmetric(
    const Mat4& m) {
  Rng rng(0xC0DE5EEDULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Matrix4d re = m.real();
  const Eigen::Matrix4d im = m.imag();
  for (int attempt = 0; attempt < 64; ++attempt) {
    double wa = 0.8372614103119955;
    double wb = 0.2846857518308491;
    if (attempt > 0) {
      wa = gauss(rng);
      wb = gauss(rng);
    }
    const Eigen::Matrix4d mix = wa * re + wb * im;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(mix);
    if (es.info() != Eigen::Success) continue;
    const Eigen::Matrix4d p = es.eigenvectors();
    const Mat4 d = p.transpose() * m * p;
    const Vec4 mu = d.diagonal();
    double offdiag = 0.0;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (r != c) offdiag = std::max(offdiag, std::abs(d(r, c)));
      }
    }
    bool unit_modulus = true;
    for (int j = 0; j < 4; ++j) {
      unit_modulus = unit_modulus && std::abs(std::abs(mu(j)) - 1.0) < 1e-9;
    }
    if (offdiag < 1e-11 && unit_modulus) {
      Eigen::Matrix4d pfixed = p;
      if (pfixed.determinant() < 0.0) pfixed.col(3) *= -1.0;
      Vec4 munorm = mu;
      for (int j = 0; j < 4; ++j) munorm(j) /= std::abs(munorm(j));
      return {pfixed, munorm};
    }
  }
  throw NumericalFailure(
      "diagonalize_unitary_symmetric: no real orthogonal eigenbasis found");
}

/// Split a (phase times) tensor-product gate k into e^{i·phase}·(a ⊗ b) with
/// det a = det b = 1.
inline std::pair<LocalLayer, double> split_product_gate(const Mat4& k) {
  // Any 2x2 block of a ⊗ b is proportional to b; pick the block with the
  // larger determinant magnitude to stay away from a zero entry of a.
  Mat2 b = k.block<2, 2>(0, 0);
  if (std::abs(b.determinant()) < 0.1) b = k.block<2, 2>(2, 0);
  const Complex detb = b.determinant();
  if (std::abs(detb) < 0.1) {
    throw NumericalFailure("split_product_gate: input is not a product gate");
  }
  b /= std::sqrt(detb);

  const Mat4 rest = k * tensor(Mat2::Identity(), b.adjoint());
  Mat2 a;
  a << rest(0, 0), rest(0, 2), rest(2, 0), rest(2, 2);
  const Complex deta = a.determinant();
  if (std::abs(deta) < 0.5) {
    throw NumericalFailure("split_product_gate: input is not a product gate");
  }
  a /= std::sqrt(deta);
  double phase = std::arg(deta) / 2.0;

  // The square roots leave a possible overall sign; fold it into the phase.
  if (max_abs_diff(Mat4(phase_factor(phase) * tensor(a, b)), k) > 0.5) {
    phase += kPi;
  }
  return {LocalLayer{a, b}, phase};
}

/// Scale a layer's factors to unit determinant, pushing residue into phase.
inline void fix_determinants(LocalLayer& layer, double& phase) {
  const Complex da = layer.a.determinant();
  const Complex db = layer.b.determinant();
  layer.a /= std::sqrt(da);
  layer.b /= std::sqrt(db);
  phase += std::arg(da) / 2.0 + std::arg(db) / 2.0;
}

// --- Chamber moves -------------------------------------------------------
//
// The chamber is reached with three kinds of exact rewrites of the
// canonical-gate exponent, each realized by explicit single-qubit dressings:
//  * shift:  c_j -= k·π/2, using e^{i(π/2)σ_j⊗σ_j} = i·(σ_j ⊗ σ_j)
//  * swap:   coordinates i,j exchanged by conjugating both qubits with a
//            π/2 rotation about the remaining axis
//  * flip:   two coordinates change sign under a Pauli on qubit A alone
//
// Every entry is verified numerically by the test suite.

struct ChamberState {
  std::array<double, 3> c;
  LocalLayer pre;
  LocalLayer post;
  double phase = 0.0;
};

inline void apply_shift(ChamberState& s, int idx, long k) {
  if (k == 0) return;
  s.c[idx] -= static_cast<double>(k) * kHalfPi;
  s.phase += static_cast<double>(k) * kHalfPi;
  if (k % 2 != 0) {
    const Mat2& sig = pauli(idx + 1);
    s.post.a = s.post.a * sig;
    s.post.b = s.post.b * sig;
  }
}

/// Conjugation axis that exchanges coordinates i and j (0-based): the
/// remaining one.
inline int swap_conj_axis(int i, int j) { return 3 - i - j + 1; }

inline void apply_swap(ChamberState& s, int i, int j) {
  const Mat2 conj = rot(swap_conj_axis(i, j), kHalfPi);
  const Mat2 conj_dag = conj.adjoint();
  s.post.a = s.post.a * conj_dag;
  s.post.b = s.post.b * conj_dag;
  s.pre.a = conj * s.pre.a;
  s.pre.b = conj * s.pre.b;
  std::swap(s.c[i], s.c[j]);
}

inline void apply_flip(ChamberState& s, int i, int j) {
  const int axis = 3 - i - j + 1;  // untouched coordinate axis
  const Mat2& sig = pauli(axis);
  s.post.a = s.post.a * sig;
  s.pre.a = sig * s.pre.a;
  s.c[i] = -s.c[i];
  s.c[j] = -s.c[j];
}

struct ChamberCandidate {
  std::array<double, 3> coords;
  int flip = -1;                  // 0:(0,1) 1:(0,2) 2:(1,2), -1: none
  std::array<int, 3> perm{0, 1, 2};
};

inline constexpr std::array<std::pair<int, int>, 3> kFlipPairs{
    {{0, 1}, {0, 2}, {1, 2}}};

}  // namespace detail

/// Bring raw canonical coordinates into the Weyl chamber. The returned
/// dressings satisfy, exactly up to roundoff,
///   canonical_gate(raw) = e^{i·phase} · post · canonical_gate(coords) · pre.
/// Boundary ties (c1 = π/4, c1 = c2, c3 = 0, c2 = |c3|) admit several
/// chamber representatives; the lexicographically greatest triple is chosen,
/// which prefers c3 ≥ 0.
inline NormalizedCanonical weyl_normalize(const CanonicalCoords& raw) {
  using namespace detail;
  ChamberState st{{raw.c1, raw.c2, raw.c3}, {}, {}, 0.0};

  // Reduce every coordinate into [0, π/2).
  for (int j = 0; j < 3; ++j) {
    const long k = static_cast<long>(std::floor(st.c[j] / kHalfPi));
    apply_shift(st, j, k);
  }

  // Enumerate the residual finite symmetry group: four double-sign-flip
  // patterns times six permutations. On the torus a flip acts as
  // c -> π/2 - c on two coordinates.
  const double tol = 1e-12;
  static const std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  // Boundary ties produce several representatives whose components differ
  // only by roundoff; the comparison must treat such components as equal or
  // the winner would be decided by 1e-16 noise instead of the c3 sign.
  const auto fuzzy_less = [tol](const std::array<double, 3>& a,
                                const std::array<double, 3>& b) {
    for (int j = 0; j < 3; ++j) {
      const std::size_t k = static_cast<std::size_t>(j);
      if (std::abs(a[k] - b[k]) > tol) return a[k] < b[k];
    }
    return false;
  };
  std::optional<ChamberCandidate> best;
  for (int f = -1; f < 3; ++f) {
    std::array<double, 3> t = st.c;
    if (f >= 0) {
      const auto [i, j] = kFlipPairs[static_cast<std::size_t>(f)];
      if (t[i] > 0.0) t[i] = kHalfPi - t[i];
      if (t[j] > 0.0) t[j] = kHalfPi - t[j];
    }
    for (const auto& p : perms) {
      std::array<double, 3> u{t[p[0]], t[p[1]], t[p[2]]};
      // Third coordinate in (π/4, π/2) stands for a negative value.
      const double s3 = (u[2] > kQuarterPi + tol) ? u[2] - kHalfPi : u[2];
      const bool member = u[0] <= kQuarterPi + tol && u[1] <= u[0] + tol &&
                          std::abs(s3) <= u[1] + tol;
      if (!member) continue;
      ChamberCandidate cand{{u[0], u[1], s3}, f, p};
      if (!best || fuzzy_less(best->coords, cand.coords)) {
        best = cand;
      }
    }
  }
  if (!best) {
    throw NumericalFailure("weyl_normalize: no chamber representative found");
  }

  // Replay the chosen moves with their dressings.
  if (best->flip >= 0) {
    const auto [i, j] = kFlipPairs[static_cast<std::size_t>(best->flip)];
    apply_flip(st, i, j);
    if (st.c[i] < 0.0) apply_shift(st, i, -1);
    if (st.c[j] < 0.0) apply_shift(st, j, -1);
  }
  {
    // Apply the permutation: position k receives old position perm[k].
    std::array<int, 3> where{};  // where[v] = current position of old coord v
    std::array<int, 3> occupant{0, 1, 2};
    for (int v = 0; v < 3; ++v) where[v] = v;
    for (int k = 0; k < 3; ++k) {
      const int want = best->perm[static_cast<std::size_t>(k)];
      const int pos = where[want];
      if (pos != k) {
        apply_swap(st, k, pos);
        std::swap(where[occupant[k]], where[occupant[pos]]);
        std::swap(occupant[k], occupant[pos]);
      }
    }
  }
  if (st.c[2] > kQuarterPi + tol) apply_shift(st, 2, 1);

  NormalizedCanonical out;
  out.coords = {st.c[0], st.c[1], st.c[2]};
  out.pre = st.pre;
  out.post = st.post;
  out.phase = st.phase;
  return out;
}

inline NormalizedCanonical weyl_normalize(double c1, double c2, double c3) {
  return weyl_normalize(CanonicalCoords{c1, c2, c3});
}

/// Canonical decomposition of a two-qubit unitary via the magic basis.
///
/// The gate is stripped of its determinant phase, conjugated into the magic
/// basis where the product m = umᵀ·um is unitary symmetric, and m is
/// diagonalized over a real orthogonal eigenbasis. Half the eigenphases give
/// raw canonical coordinates (branches fixed so they sum to zero mod 2π);
/// the two orthogonal frames give the local layers, and weyl_normalize
/// brings the coordinates into the chamber.
inline KakDecomposition kak(const Mat4& u, double tol = kUnitaryTol) {
  require_unitary(u, tol, "kak input");

  const double det_phase = std::arg(u.determinant()) / 4.0;
  const Mat4 su = phase_factor(-det_phase) * u;
  const Mat4& q = magic_basis();
  const Mat4 um = q.adjoint() * su * q;
  const Mat4 m = um.transpose() * um;

  auto [p, mu] = detail::diagonalize_unitary_symmetric(m);

  std::array<double, 4> lam{};
  for (int j = 0; j < 4; ++j) lam[j] = std::arg(mu(j)) / 2.0;
  // Branch fixing: the halves are defined mod π; shift slots by π until the
  // sum vanishes mod 2π (det um = 1 guarantees it is a multiple of π).
  long excess = std::lround((lam[0] + lam[1] + lam[2] + lam[3]) / kPi);
  while (excess != 0) {
    if (excess > 0) {
      auto it = std::max_element(lam.begin(), lam.end());
      *it -= kPi;
      --excess;
    } else {
      auto it = std::min_element(lam.begin(), lam.end());
      *it += kPi;
      ++excess;
    }
  }

  const CanonicalCoords raw{(lam[0] + lam[1]) / 2.0, (lam[1] + lam[3]) / 2.0,
                            (lam[0] + lam[3]) / 2.0};

  Mat4 delta_inv = Mat4::Zero();
  for (int j = 0; j < 4; ++j) delta_inv(j, j) = phase_factor(-lam[j]);
  const Mat4 pc = p;  // real orthogonal, promoted to complex
  const Mat4 frame_post = um * pc * delta_inv;   // real orthogonal, det +1
  const Mat4 frame_pre = pc.transpose();

  auto [post_layer, post_phase] =
      detail::split_product_gate(q * frame_post * q.adjoint());
  auto [pre_layer, pre_phase] =
      detail::split_product_gate(q * frame_pre * q.adjoint());

  const NormalizedCanonical nf = weyl_normalize(raw);

  KakDecomposition out;
  out.coords = nf.coords;
  out.post = compose(post_layer, nf.post);
  out.pre = compose(nf.pre, pre_layer);
  out.phase = det_phase + post_phase + pre_phase + nf.phase;
  detail::fix_determinants(out.post, out.phase);
  detail::fix_determinants(out.pre, out.phase);
  return out;
}

inline CanonicalCoords canonical_coords(const Mat4& u,
                                        double tol = kUnitaryTol) {
  return kak(u, tol).coords;
}

/// Multiset of eigenphases of m = umᵀ·um with a common global phase removed;
/// equal multisets (up to the residual π/2 ambiguity of the removal)
/// characterize local equivalence.
struct LocalInvariant {
  std::array<double, 4> phases{};  // sorted, each in (-π, π]

  /// Ambiguity-aware comparison: minimum over the four global π/2 shifts and
  /// all slot assignments of the largest wrapped phase difference.
  static double distance(const LocalInvariant& x, const LocalInvariant& y) {
    auto wrapdist = [](double a, double b) {
      double d = std::fabs(detail::wrap_pi(a - b));
      return d;
    };
    std::array<int, 4> idx{0, 1, 2, 3};
    double bestall = 4.0 * kPi;
    for (int k = 0; k < 4; ++k) {
      const double shift = k * kHalfPi;
      std::array<int, 4> perm = idx;
      do {
        double worst = 0.0;
        for (int j = 0; j < 4; ++j) {
          worst = std::max(
              worst, wrapdist(x.phases[static_cast<std::size_t>(j)],
                              y.phases[static_cast<std::size_t>(perm[
                                  static_cast<std::size_t>(j)])] +
                                  shift));
        }
        bestall = std::min(bestall, worst);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return bestall;
  }
};

inline LocalInvariant local_invariant(const Mat4& u,
                                      double tol = kUnitaryTol) {
  require_unitary(u, tol, "local_invariant input");
  const Mat4& q = magic_basis();
  const Mat4 um = q.adjoint() * u * q;
  const Mat4 m = um.transpose() * um;
  auto [p, mu] = detail::diagonalize_unitary_symmetric(m);
  (void)p;

  Complex prod{1.0, 0.0};
  for (int j = 0; j < 4; ++j) prod *= mu(j);
  const double psi = std::arg(prod) / 4.0;

  // Canonical residual-shift choice: smallest L1 norm, then L∞, then lex.
  std::array<double, 4> best{};
  double best_l1 = -1.0, best_linf = 0.0;
  for (int k = 0; k < 4; ++k) {
    std::array<double, 4> cand{};
    for (int j = 0; j < 4; ++j) {
      cand[static_cast<std::size_t>(j)] =
          detail::wrap_pi(std::arg(mu(j)) - psi - k * kHalfPi);
    }
    std::sort(cand.begin(), cand.end());
    double l1 = 0.0, linf = 0.0;
    for (double v : cand) {
      l1 += std::fabs(v);
      linf = std::max(linf, std::fabs(v));
    }
    const bool better =
        best_l1 < 0.0 || l1 < best_l1 - 1e-12 ||
        (std::fabs(l1 - best_l1) <= 1e-12 &&
         (linf < best_linf - 1e-12 ||
          (std::fabs(linf - best_linf) <= 1e-12 &&
           std::lexicographical_compare(cand.begin(), cand.end(),
                                        best.begin(), best.end()))));
    if (better) {
      best = cand;
      best_l1 = l1;
      best_linf = linf;
    }
  }
  return LocalInvariant{best};
}

/// True iff the normalized coordinates of u and v agree componentwise.
inline bool is_locally_equivalent(const Mat4& u, const Mat4& v,
                                  double tol = kEqTol) {
  return canonical_coords(u).max_abs_diff(canonical_coords(v)) <= tol;
}

/// Chamber coordinates of the mirror class: all three shifted by π/4 and
/// renormalized.
inline CanonicalCoords mirror_coords(const CanonicalCoords& c) {
  return weyl_normalize(c.c1 + kQuarterPi, c.c2 + kQuarterPi,
                        c.c3 + kQuarterPi)
      .coords;
}

/// Composition with the SWAP class: canonical_gate(π/4,π/4,π/4)·u. Its
/// coordinates equal mirror_coords of u's coordinates.
inline Mat4 mirror_of(const Mat4& u, double tol = kUnitaryTol) {
  require_unitary(u, tol, "mirror_of input");
  static const Mat4 swap_class =
      canonical_gate(kQuarterPi, kQuarterPi, kQuarterPi);
  return swap_class * u;
}

}  // namespace weyl
