// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "weyl/canonical.hpp"
#include "weyl/matcore.hpp"

namespace weyl {

// --- Base gates and circuits ----------------------------------------------

/// Entangling gate of the class exp(i(γ/2)σz⊗σz); chamber coordinates
/// (γ/2, 0, 0). Valid range 0 < γ ≤ π/2.
struct Controlled {
  double gamma;
};

/// Entangling gate of the class with chamber coordinates (π/4, α2, 0).
/// Valid range 0 ≤ α2 ≤ π/4.
struct SuperControlled {
  double alpha2;
};

/// Arbitrary fixed two-qubit unitary used as the base gate.
struct CustomGate {
  Mat4 matrix;
};

using BaseGate = std::variant<Controlled, SuperControlled, CustomGate>;

inline void validate_base(const BaseGate& base) {
  if (const auto* c = std::get_if<Controlled>(&base)) {
    if (!(c->gamma > 0.0) || c->gamma > kHalfPi + 1e-12) {
      throw DomainError("controlled base requires 0 < gamma <= pi/2");
    }
  } else if (const auto* s = std::get_if<SuperControlled>(&base)) {
    if (s->alpha2 < -1e-12 || s->alpha2 > kQuarterPi + 1e-12) {
      throw DomainError("supercontrolled base requires 0 <= alpha2 <= pi/4");
    }
  } else {
    require_unitary(std::get<CustomGate>(base).matrix, kUnitaryTol,
                    "custom base gate");
  }
}

inline Mat4 base_matrix(const BaseGate& base) {
  if (const auto* c = std::get_if<Controlled>(&base)) {
    return controlled_gate(c->gamma);
  }
  if (const auto* s = std::get_if<SuperControlled>(&base)) {
    return canonical_gate(kQuarterPi, s->alpha2, 0.0);
  }
  return std::get<CustomGate>(base).matrix;
}

inline bool same_base(const BaseGate& a, const BaseGate& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ca = std::get_if<Controlled>(&a)) {
    return ca->gamma == std::get<Controlled>(b).gamma;
  }
  if (const auto* sa = std::get_if<SuperControlled>(&a)) {
    return sa->alpha2 == std::get<SuperControlled>(b).alpha2;
  }
  return max_abs_diff(std::get<CustomGate>(a).matrix,
                      std::get<CustomGate>(b).matrix) == 0.0;
}

/// Alternating circuit L_n · G · L_{n-1} · ... · G · L_0 with L_0 applied
/// first, n base-gate applications and a recorded global phase. A per-slot
/// override list (empty, or one optional entry per application) replaces
/// individual applications by fixed matrices.
struct Circuit {
  double phase = 0.0;
  BaseGate base = Controlled{kHalfPi};
  std::vector<std::optional<Mat4>> overrides;
  std::vector<LocalLayer> layers{LocalLayer{}};

  int applications() const { return static_cast<int>(layers.size()) - 1; }

  Mat4 gate_matrix(int k) const {
    if (k < 0 || k >= applications()) {
      throw IndexOutOfRange("circuit application index out of range");
    }
    if (!overrides.empty() && overrides[static_cast<std::size_t>(k)]) {
      return *overrides[static_cast<std::size_t>(k)];
    }
    return base_matrix(base);
  }

  void set_override(int k, const Mat4& m) {
    if (k < 0 || k >= applications()) {
      throw IndexOutOfRange("circuit application index out of range");
    }
    if (overrides.empty()) {
      overrides.resize(static_cast<std::size_t>(applications()));
    }
    overrides[static_cast<std::size_t>(k)] = m;
  }
};

/// Full matrix of the circuit, e^{i·phase}·L_n·G·…·G·L_0.
inline Mat4 evaluate(const Circuit& c) {
  if (c.layers.empty()) {
    throw MalformedCircuit("circuit must contain at least one local layer");
  }
  if (!c.overrides.empty() &&
      c.overrides.size() != static_cast<std::size_t>(c.applications())) {
    throw MalformedCircuit("override list length must equal applications");
  }
  validate_base(c.base);
  for (const LocalLayer& l : c.layers) {
    if (!is_unitary(l.a) || !is_unitary(l.b)) {
      throw MalformedCircuit("local layer is not unitary");
    }
  }
  Mat4 acc = c.layers.front().matrix();
  for (int k = 0; k < c.applications(); ++k) {
    acc = c.gate_matrix(k) * acc;
    acc = c.layers[static_cast<std::size_t>(k) + 1].matrix() * acc;
  }
  return phase_factor(c.phase) * acc;
}

/// Wrap the circuit in extra local layers: evaluate becomes
/// post · (old evaluation) · pre.
inline void dress(Circuit& c, const LocalLayer& pre, const LocalLayer& post) {
  c.layers.front() = compose(c.layers.front(), pre);
  c.layers.back() = compose(post, c.layers.back());
}

/// Insert one base-gate application before everything else; evaluate becomes
/// (old evaluation) · after · G · before.
inline void prepend_application(Circuit& c, const LocalLayer& before,
                                const LocalLayer& after) {
  c.layers.front() = compose(c.layers.front(), after);
  c.layers.insert(c.layers.begin(), before);
  if (!c.overrides.empty()) {
    c.overrides.insert(c.overrides.begin(), std::nullopt);
  }
}

/// Concatenate: evaluate(result) = evaluate(second) · evaluate(first).
inline Circuit concat(const Circuit& first, const Circuit& second) {
  if (!same_base(first.base, second.base)) {
    throw MalformedCircuit("concat requires identical base gates");
  }
  Circuit out;
  out.base = first.base;
  out.phase = first.phase + second.phase;
  out.layers.assign(first.layers.begin(), first.layers.end() - 1);
  out.layers.push_back(compose(second.layers.front(), first.layers.back()));
  out.layers.insert(out.layers.end(), second.layers.begin() + 1,
                    second.layers.end());
  if (!first.overrides.empty() || !second.overrides.empty()) {
    out.overrides.resize(static_cast<std::size_t>(out.applications()));
    for (int k = 0; k < first.applications(); ++k) {
      if (!first.overrides.empty()) {
        out.overrides[static_cast<std::size_t>(k)] =
            first.overrides[static_cast<std::size_t>(k)];
      }
    }
    for (int k = 0; k < second.applications(); ++k) {
      if (!second.overrides.empty()) {
        out.overrides[static_cast<std::size_t>(first.applications() + k)] =
            second.overrides[static_cast<std::size_t>(k)];
      }
    }
  }
  return out;
}

/// Replace application k by a sub-circuit that evaluates to exactly the same
/// gate over the same base, merging the adjacent layers.
inline Circuit splice_application(const Circuit& c, int k,
                                  const Circuit& sub) {
  if (k < 0 || k >= c.applications()) {
    throw IndexOutOfRange("splice index out of range");
  }
  if (!same_base(c.base, sub.base)) {
    throw MalformedCircuit("splice requires identical base gates");
  }
  Circuit out;
  out.base = c.base;
  out.phase = c.phase + sub.phase;
  out.layers.assign(c.layers.begin(), c.layers.begin() + k);
  out.layers.push_back(
      compose(sub.layers.front(), c.layers[static_cast<std::size_t>(k)]));
  out.layers.insert(out.layers.end(), sub.layers.begin() + 1,
                    sub.layers.end() - 1);
  out.layers.push_back(compose(c.layers[static_cast<std::size_t>(k) + 1],
                               sub.layers.back()));
  out.layers.insert(out.layers.end(), c.layers.begin() + k + 2,
                    c.layers.end());
  const bool any = !c.overrides.empty() || !sub.overrides.empty();
  if (any) {
    out.overrides.resize(static_cast<std::size_t>(out.applications()));
    int pos = 0;
    for (int j = 0; j < k; ++j, ++pos) {
      if (!c.overrides.empty()) {
        out.overrides[static_cast<std::size_t>(pos)] =
            c.overrides[static_cast<std::size_t>(j)];
      }
    }
    for (int j = 0; j < sub.applications(); ++j, ++pos) {
      if (!sub.overrides.empty()) {
        out.overrides[static_cast<std::size_t>(pos)] =
            sub.overrides[static_cast<std::size_t>(j)];
      }
    }
    for (int j = k + 1; j < c.applications(); ++j, ++pos) {
      if (!c.overrides.empty()) {
        out.overrides[static_cast<std::size_t>(pos)] =
            c.overrides[static_cast<std::size_t>(j)];
      }
    }
  }
  return out;
}

/// Absorb the outer local layers extracted by kak so that the circuit
/// evaluates to exactly `target`. Requires the circuit to already be in the
/// target's local-equivalence class.
inline void finalize_to_target(Circuit& c, const Mat4& target) {
  const KakDecomposition kp = kak(evaluate(c));
  const KakDecomposition kt = kak(target);
  if (kp.coords.max_abs_diff(kt.coords) > 1e-7) {
    throw NumericalFailure(
        "finalize_to_target: circuit is not locally equivalent to target");
  }
  dress(c, compose(kp.pre.adjoint(), kt.pre),
        compose(kt.post, kp.post.adjoint()));
  c.phase += kt.phase - kp.phase;
}

// --- Composition law -------------------------------------------------------

/// Unnormalized coordinates (x/2, y/2, z/2) of the two-factor product
///   U_d(a1/2,a2/2,a3/2) · (e^{i(s1/2)σy} ⊗ e^{i(s2/2)σy}) ·
///   U_d(b1/2,b2/2,b3/2).
struct ComposeResult {
  double x;
  double y;
  double z;
};

using CoordTriple = std::array<double, 3>;

namespace detail {

inline double checked_acos(double q, double tol, const char* what) {
  if (q > 1.0) {
    if (q > 1.0 + tol) {
      throw Infeasible(std::string(what) + ": arccos argument exceeds 1");
    }
    q = 1.0;
  } else if (q < -1.0) {
    if (q < -1.0 - tol) {
      throw Infeasible(std::string(what) + ": arccos argument below -1");
    }
    q = -1.0;
  }
  return std::acos(q);
}

}  // namespace detail

/// Composition law for the canonical coordinates of the product above:
///   cos(x+y) = cos(a1+a3)cos(b1+b3) - cos(s1-s2)sin(a1+a3)sin(b1+b3)
///   cos(x-y) = cos(a1-a3)cos(b1-b3) - cos(s1+s2)sin(a1-a3)sin(b1-b3)
///   z        = a2 + b2
/// with x+y and x-y taken on the [0, π] branch.
inline ComposeResult compose_coords(const CoordTriple& a, const CoordTriple& b,
                                    double s1, double s2) {
  const double ap = a[0] + a[2], bp = b[0] + b[2];
  const double am = a[0] - a[2], bm = b[0] - b[2];
  const double cp = std::cos(ap) * std::cos(bp) -
                    std::cos(s1 - s2) * std::sin(ap) * std::sin(bp);
  const double cm = std::cos(am) * std::cos(bm) -
                    std::cos(s1 + s2) * std::sin(am) * std::sin(bm);
  const double sum = detail::checked_acos(cp, 1e-9, "compose_coords");
  const double diff = detail::checked_acos(cm, 1e-9, "compose_coords");
  return {(sum + diff) / 2.0, (sum - diff) / 2.0, a[1] + b[1]};
}

/// Invert the composition law: find (s1, s2) such that the product above has
/// x+y = target_sum and x-y = target_diff. Throws Infeasible when a target
/// cosine lies outside the attainable interval beyond tolerance.
inline std::pair<double, double> solve_interleaving_angles(
    const CoordTriple& a, const CoordTriple& b, double target_sum,
    double target_diff, double tol = 1e-9) {
  const double ap = a[0] + a[2], bp = b[0] + b[2];
  const double am = a[0] - a[2], bm = b[0] - b[2];

  auto solve_one = [&](double ca, double cb, double sa, double sb,
                       double target) {
    const double den = sa * sb;
    const double num = ca * cb - std::cos(target);
    if (std::abs(den) < 1e-12) {
      if (std::abs(num) > tol) {
        throw Infeasible(
            "solve_interleaving_angles: degenerate factor cannot reach "
            "target");
      }
      return 0.0;
    }
    return detail::checked_acos(num / den, tol, "solve_interleaving_angles");
  };

  // cos(s1-s2) from the sum relation, cos(s1+s2) from the difference one.
  const double diff = solve_one(std::cos(ap), std::cos(bp), std::sin(ap),
                                std::sin(bp), target_sum);
  const double sum = solve_one(std::cos(am), std::cos(bm), std::sin(am),
                               std::sin(bm), target_diff);
  return {(sum + diff) / 2.0, (sum - diff) / 2.0};
}

// --- Reachable regions -----------------------------------------------------

/// Inequality description of the coordinates reachable with n applications
/// of controlled base gates, in doubled units: a target U_d(h1/2,h2/2,h3/2).
struct Region {
  int n = 2;
  double gamma1 = kHalfPi;
  double gamma2 = kHalfPi;
  /// exact: two applications (necessary and sufficient);
  /// full: the necessary budget inequality is also sufficient;
  /// three_app_subset: sufficiency known only on the three-application
  /// subregion.
  enum class Sufficiency { exact, full, three_app_subset };
  Sufficiency sufficiency = Sufficiency::exact;

  struct Membership {
    bool inside = true;
    std::string binding;  // violated inequality when outside
  };

  /// Necessary predicate.
  Membership contains(double h1, double h2, double h3,
                      double slack = 1e-9) const {
    auto fail = [](const char* name) { return Membership{false, name}; };
    if (h2 < -slack) return fail("0 <= h2");
    if (h1 < h2 - slack) return fail("h2 <= h1");
    if (h1 > kHalfPi + slack) return fail("h1 <= pi/2");
    if (n == 2) {
      if (h1 - h2 < gamma1 - gamma2 - slack) {
        return fail("gamma1-gamma2 <= h1-h2");
      }
      if (h1 + h2 > gamma1 + gamma2 + slack) {
        return fail(gamma1 == gamma2 ? "h1+h2 <= n*gamma"
                                     : "h1+h2 <= gamma1+gamma2");
      }
      if (std::abs(h3) > slack) return fail("h3 = 0");
      return {};
    }
    if (std::abs(h3) > h2 + slack) return fail("|h3| <= h2");
    if (h1 + h2 + std::abs(h3) > n * gamma1 + slack) {
      return fail("h1+h2+|h3| <= n*gamma");
    }
    return {};
  }

  /// Sufficient predicate: equals contains() except for n = 3, where the
  /// known-constructive subregion applies.
  Membership sufficient_contains(double h1, double h2, double h3,
                                 double slack = 1e-9) const {
    auto base = contains(h1, h2, h3, slack);
    if (!base.inside || sufficiency != Sufficiency::three_app_subset) {
      return base;
    }
    auto fail = [](const char* name) { return Membership{false, name}; };
    const double cap = std::min(3.0 * gamma1 - std::abs(h3), kPi);
    if (h1 - h2 > cap + slack) {
      return fail("h1-h2 <= min(3*gamma-|h3|, pi)");
    }
    if (h1 + h2 > cap + slack) {
      return fail("h1+h2 <= min(3*gamma-|h3|, pi)");
    }
    if (std::abs(h2) > gamma1 + slack) return fail("|h2| <= gamma");
    return {};
  }

  std::vector<std::string> describe() const {
    std::vector<std::string> out;
    std::ostringstream os;
    os.precision(17);
    if (n == 2) {
      out.emplace_back("0 <= h2 <= h1 <= pi/2");
      out.emplace_back("h3 = 0");
      os << "gamma1-gamma2 <= h1-h2  (gamma1-gamma2 = " << gamma1 - gamma2
         << ")";
      out.push_back(os.str());
      os.str("");
      os << "h1+h2 <= gamma1+gamma2 = " << gamma1 + gamma2;
      out.push_back(os.str());
      return out;
    }
    out.emplace_back("0 <= |h3| <= h2 <= h1 <= pi/2");
    os << "h1+h2+|h3| <= n*gamma = " << n * gamma1;
    out.push_back(os.str());
    if (sufficiency == Sufficiency::three_app_subset) {
      out.emplace_back(
          "sufficient subregion: h1-h2 <= min(3*gamma-|h3|, pi), "
          "h1+h2 <= min(3*gamma-|h3|, pi), |h2| <= gamma");
    } else {
      out.emplace_back("necessary bound is also sufficient");
    }
    return out;
  }
};

inline Region reachable_region(const BaseGate& base, int n) {
  const auto* c = std::get_if<Controlled>(&base);
  if (c == nullptr) {
    throw UnsupportedBase("reachable_region requires a controlled base gate");
  }
  validate_base(base);
  if (n < 2) throw DomainError("reachable_region requires n >= 2");
  Region r;
  r.n = n;
  r.gamma1 = r.gamma2 = c->gamma;
  r.sufficiency = n == 2 ? Region::Sufficiency::exact
                         : (n == 3 ? Region::Sufficiency::three_app_subset
                                   : Region::Sufficiency::full);
  return r;
}

/// Region of targets reachable with one application each of two controlled
/// gates with angles gamma1 >= gamma2.
inline Region two_controlled_region(double gamma1, double gamma2) {
  if (!(gamma2 > 0.0) || gamma2 > gamma1 + 1e-12 ||
      gamma1 > kHalfPi + 1e-12) {
    throw DomainError("two_controlled_region requires 0 < gamma2 <= gamma1 <= pi/2");
  }
  Region r;
  r.n = 2;
  r.gamma1 = gamma1;
  r.gamma2 = gamma2;
  r.sufficiency = Region::Sufficiency::exact;
  return r;
}

// --- Controlled-gate constructions ----------------------------------------

/// Simulate U_d(h1/2, h2/2, 0) with one application each of the controlled
/// gates exp(i(γ1/2)σzσz) and exp(i(γ2/2)σzσz), γ1 ≥ γ2. The evaluation
/// equals canonical_gate(h1/2, h2/2, 0) exactly, with the outer locals
/// recovered by kak absorbed into the end layers.
inline Circuit synth_two_controlled(double h1, double h2, double gamma1,
                                    double gamma2, double slack = 1e-9) {
  if (!(gamma2 > 0.0) || gamma2 > gamma1 + 1e-12 ||
      gamma1 > kHalfPi + 1e-12) {
    throw DomainError(
        "synth_two_controlled requires 0 < gamma2 <= gamma1 <= pi/2");
  }
  const Region region = two_controlled_region(gamma1, gamma2);
  if (auto m = region.contains(h1, h2, 0.0, slack); !m.inside) {
    throw OutOfRegion(m.binding);
  }

  const auto [s1, s2] = solve_interleaving_angles(
      {0.0, 0.0, gamma1}, {0.0, 0.0, gamma2}, h1 + h2, h1 - h2, slack);

  Circuit c;
  c.base = Controlled{gamma1};
  c.layers = {LocalLayer{}, LocalLayer{rot_y(s1), rot_y(s2)}, LocalLayer{}};
  if (gamma1 != gamma2) c.set_override(0, controlled_gate(gamma2));
  finalize_to_target(c, canonical_gate(h1 / 2.0, h2 / 2.0, 0.0));
  return c;
}

Circuit synth_controlled_n(double h1, double h2, double gamma, int n,
                           double slack);

/// Exact circuit for canonical_gate(r1, r2, r3) over n controlled-gate
/// applications, for arbitrary raw coordinates whose class has a vanishing
/// third chamber coordinate (a two-axis exponent). The raw gate is folded
/// into the chamber and the dressings are replayed around the in-chamber
/// construction; folding can only shrink the weight, so the budget check on
/// the chamber coordinates is implied by a budget on the raw ones.
inline Circuit synth_controlled_class(double r1, double r2, double r3,
                                      double gamma, int n,
                                      double slack = 1e-9) {
  const NormalizedCanonical nf = weyl_normalize(r1, r2, r3);
  if (std::abs(nf.coords.c3) > 1e-12) {
    throw OutOfRegion("h3 = 0 (class not reachable with controlled gates)");
  }
  Circuit c = synth_controlled_n(2.0 * nf.coords.c1, 2.0 * nf.coords.c2,
                                 gamma, n, slack);
  dress(c, nf.pre, nf.post);
  c.phase += nf.phase;
  return c;
}

/// Simulate U_d(h1/2, h2/2, 0) with exactly n applications of the controlled
/// gate exp(i(γ/2)σzσz). Requires 0 ≤ h2 ≤ h1 ≤ π/2 and h1+h2 ≤ nγ.
///
/// Recursive construction: when the target fits the (n-1)-application
/// budget, build it there and pad by replacing one application with a
/// two-application simulation of the base gate itself; otherwise peel one
/// application carrying an x-axis controlled exponent of weight γ and
/// recurse on the reduced target.
inline Circuit synth_controlled_n(double h1, double h2, double gamma, int n,
                                  double slack = 1e-9) {
  validate_base(Controlled{gamma});
  if (n < 2) throw DomainError("synth_controlled_n requires n >= 2");
  if (h2 < -slack) throw OutOfRegion("0 <= h2");
  if (h1 < h2 - slack) throw OutOfRegion("h2 <= h1");
  if (h1 > kHalfPi + slack) throw OutOfRegion("h1 <= pi/2");
  if (h1 + h2 > n * gamma + slack) throw OutOfRegion("h1+h2 <= n*gamma");

  if (n == 2) return synth_two_controlled(h1, h2, gamma, gamma, slack);

  if (h1 + h2 <= (n - 1) * gamma + 1e-12) {
    Circuit inner = synth_controlled_n(h1, h2, gamma, n - 1, slack);
    // The base gate simulated by two of its own applications.
    Circuit self_sim =
        synth_controlled_class(0.0, 0.0, gamma / 2.0, gamma, 2, slack);
    return splice_application(inner, 0, self_sim);
  }

  // Peel one application carrying exp(i(γ/2)σxσx); the commuting exponents
  // then add up to the target exactly.
  Circuit inner = synth_controlled_class((h1 - gamma) / 2.0, h2 / 2.0, 0.0,
                                         gamma, n - 1, slack);
  const Mat2 cy = rot_y(kHalfPi);
  prepend_application(inner,
                      LocalLayer{cy.adjoint().eval(), cy.adjoint().eval()},
                      LocalLayer{cy, cy});
  return inner;
}

/// Simulate U_d(h1/2, h2/2, h3/2) with exactly n ≥ 4 applications of the
/// controlled gate exp(i(γ/2)σzσz), requiring h1+h2+|h3| ≤ nγ and
/// 0 ≤ |h3| ≤ h2 ≤ h1 ≤ π/2.
///
/// The target exponent is split into two commuting factors, one carrying the
/// (x,z) axes with m = ⌈n/3⌉ applications, the other carrying the (x,y) axes
/// with the remaining n-m; each factor's weights stay within its budget, so
/// both reduce to the uniform-n path after chamber folding.
inline Circuit synth_controlled_general(double h1, double h2, double h3,
                                        double gamma, int n,
                                        double slack = 1e-9) {
  validate_base(Controlled{gamma});
  if (n < 4) throw DomainError("synth_controlled_general requires n >= 4");
  const double habs = std::abs(h3);
  if (h2 < habs - slack) throw OutOfRegion("|h3| <= h2");
  if (h1 < h2 - slack) throw OutOfRegion("h2 <= h1");
  if (h1 > kHalfPi + slack) throw OutOfRegion("h1 <= pi/2");
  if (h1 + h2 + habs > n * gamma + slack) {
    throw OutOfRegion("h1+h2+|h3| <= n*gamma");
  }

  const int m = (n + 2) / 3;  // ceil(n/3); n >= 4 gives n-m >= m >= 2

  // exp((i/2)((mγ-|h3|)σxσx + h3·σzσz)): weights sum to mγ.
  const Circuit xz = synth_controlled_class((m * gamma - habs) / 2.0, 0.0,
                                            h3 / 2.0, gamma, m, slack);
  // exp((i/2)((h1-mγ+|h3|)σxσx + h2·σyσy)): weights sum within (n-m)γ.
  const Circuit xy = synth_controlled_class((h1 - m * gamma + habs) / 2.0,
                                            h2 / 2.0, 0.0, gamma, n - m,
                                            slack);
  return concat(xz, xy);
}

/// Simulate U_d(h1/2, h2/2, h3/2) with exactly three applications of the
/// controlled gate exp(i(γ/2)σzσz). Preconditions:
///   0 ≤ h1-h2 ≤ min(3γ-|h3|, π), 0 ≤ h1+h2 ≤ min(3γ-|h3|, π),
///   |h3| ≤ h2 ≤ γ.
///
/// Two applications realize an intermediate gate U_d(c1/2, h3/2, 0); the
/// third is the base gate itself, joined through the interleaving-angle
/// solver. c1 is taken at the midpoint of its feasible interval for margin
/// against arccos boundary ill-conditioning.
inline Circuit synth_controlled_three(double h1, double h2, double h3,
                                      double gamma, double slack = 1e-9) {
  validate_base(Controlled{gamma});
  const double habs = std::abs(h3);
  const double cap = std::min(3.0 * gamma - habs, kPi);
  if (h1 - h2 < -slack) throw OutOfRegion("0 <= h1-h2");
  if (h1 - h2 > cap + slack) {
    throw OutOfRegion("h1-h2 <= min(3*gamma-|h3|, pi)");
  }
  if (h1 + h2 < -slack) throw OutOfRegion("0 <= h1+h2");
  if (h1 + h2 > cap + slack) {
    throw OutOfRegion("h1+h2 <= min(3*gamma-|h3|, pi)");
  }
  if (std::abs(h2) > gamma + slack) throw OutOfRegion("|h2| <= gamma");
  if (habs > std::abs(h2) + slack) throw OutOfRegion("|h3| <= h2");

  const double lo = std::max({gamma, h1 + h2 - gamma, h1 - h2 - gamma});
  const double hi = std::min({2.0 * gamma - habs, kPi - gamma,
                              h1 + h2 + gamma, h1 - h2 + gamma});
  if (lo > hi + slack) {
    throw Infeasible("synth_controlled_three: empty c1 interval");
  }
  const double c1 = std::min(std::max(0.5 * (lo + hi), lo), hi);

  // Exact two-application realization of U_d(c1/2, h3/2, 0); c1 may exceed
  // π/2, in which case the chamber dressings fold it back into range.
  Circuit inner =
      synth_controlled_class(c1 / 2.0, h3 / 2.0, 0.0, gamma, 2, slack);

  const auto [s1, s2] = solve_interleaving_angles(
      {c1, h3, 0.0}, {0.0, 0.0, gamma}, h1 + h2, h1 - h2, slack);
  prepend_application(inner, LocalLayer{},
                      LocalLayer{rot_y(s1), rot_y(s2)});
  finalize_to_target(inner, canonical_gate(h1 / 2.0, h2 / 2.0, h3 / 2.0));
  return inner;
}

// --- Supercontrolled constructions ----------------------------------------

/// The three fixed gates of the supercontrolled construction, each locally
/// equivalent to the base class (π/4, α2, 0). `first` maps the magic states
/// onto the computational basis (with a phase on the last), `middle`
/// rotates within the computational basis, `last` maps a rotated frame back
/// onto the magic states.
struct StageGates {
  Mat4 first;
  Mat4 middle;
  Mat4 last;
};

inline StageGates supercontrolled_stage_gates(double alpha2) {
  const double c = std::cos(2.0 * alpha2), s = std::sin(2.0 * alpha2);
  const Mat4& q = magic_basis();

  Mat4 d = Mat4::Identity();
  d(3, 3) = phase_factor(4.0 * alpha2);
  const Mat4 first = d * q.adjoint();

  Mat4 middle = Mat4::Zero();
  middle(0, 0) = c;
  middle(2, 0) = s;
  middle(1, 1) = 1.0;
  middle(3, 2) = phase_factor(8.0 * alpha2);
  middle(0, 3) = s;
  middle(2, 3) = -c;

  Vec4 v1 = Vec4::Zero(), v4 = Vec4::Zero();
  v1(0) = c;
  v1(2) = s;
  v4(0) = s;
  v4(2) = -c;
  Vec4 e1 = Vec4::Zero(), e3 = Vec4::Zero();
  e1(1) = 1.0;
  e3(3) = 1.0;
  const Mat4 last = magic_state(1) * v1.adjoint() +
                    magic_state(2) * e1.adjoint() +
                    phase_factor(-4.0 * alpha2) * magic_state(3) * e3.adjoint() +
                    magic_state(4) * v4.adjoint();

  return {first, middle, last};
}

/// Simulate U_d(h1, h2, 0) with two applications of the supercontrolled base
/// gate of class (π/4, α2, 0): the first stage gate conjugates a pair of
/// single-qubit z rotations. Evaluation equals canonical_gate(h1, h2, 0) up
/// to global phase.
inline Circuit synth_supercontrolled2(double h1, double h2, double alpha2) {
  validate_base(SuperControlled{alpha2});
  const StageGates sg = supercontrolled_stage_gates(alpha2);
  const KakDecomposition ka = kak(sg.first);
  const KakDecomposition kinv = kak(Mat4(sg.first.adjoint()));

  Circuit c;
  c.base = SuperControlled{alpha2};
  const LocalLayer mid{rot_z(2.0 * h1), rot_z(-2.0 * h2)};
  c.layers = {ka.pre, compose(kinv.pre, compose(mid, ka.post)), kinv.post};
  c.phase = ka.phase + kinv.phase;
  return c;
}

/// Simulate any U_d(h1, h2, h3) with three applications of the
/// supercontrolled base gate of class (π/4, α2, 0). The stage gates are
/// realized as the base gate with kak-extracted dressings; the interleaved
/// layers are single-qubit z rotations in the stated full-angle exponents,
/// and the scalar prefactor is folded into the circuit phase. Correctness is
/// asserted up to global phase.
inline Circuit synth_supercontrolled3(double h1, double h2, double h3,
                                      double alpha2) {
  validate_base(SuperControlled{alpha2});
  const StageGates sg = supercontrolled_stage_gates(alpha2);
  const KakDecomposition ka = kak(sg.first);
  const KakDecomposition kb = kak(sg.middle);
  const KakDecomposition kc = kak(sg.last);
  const double c2 = alpha2;

  Circuit c;
  c.base = SuperControlled{alpha2};
  const LocalLayer mid1{rot_z(2.0 * (h1 + 2.0 * c2)), rot_z(-2.0 * h2)};
  const LocalLayer mid2{Mat2::Identity(), rot_z(2.0 * h3)};
  c.layers = {ka.pre, compose(kb.pre, compose(mid1, ka.post)),
              compose(kc.pre, compose(mid2, kb.post)), kc.post};
  c.phase = -2.0 * c2 + ka.phase + kb.phase + kc.phase;
  return c;
}

// --- Universal dispatch ----------------------------------------------------

/// Number of controlled-gate applications that suffice for an arbitrary
/// target: ⌈3π/(2γ)⌉.
inline int universal_budget(double gamma) {
  if (!(gamma > 0.0) || gamma > kHalfPi + 1e-12) {
    throw DomainError("universal_budget requires 0 < gamma <= pi/2");
  }
  return static_cast<int>(std::ceil(3.0 * kPi / (2.0 * gamma) - 1e-9));
}

/// Synthesize an arbitrary two-qubit target over a controlled or
/// supercontrolled base gate. The target's kak outer locals are absorbed
/// into the end layers; the evaluation matches the target up to global
/// phase (exactly, for the controlled paths).
inline Circuit synth_universal(const Mat4& target, const BaseGate& base) {
  const KakDecomposition kt = kak(target);
  Circuit inner;
  if (const auto* sc = std::get_if<SuperControlled>(&base)) {
    inner = synth_supercontrolled3(kt.coords.c1, kt.coords.c2, kt.coords.c3,
                                   sc->alpha2);
  } else if (const auto* ct = std::get_if<Controlled>(&base)) {
    const int n = universal_budget(ct->gamma);
    const double h1 = 2.0 * kt.coords.c1;
    const double h2 = 2.0 * kt.coords.c2;
    const double h3 = 2.0 * kt.coords.c3;
    if (n == 3) {
      inner = synth_controlled_three(h1, h2, h3, ct->gamma);
    } else {
      inner = synth_controlled_general(h1, h2, h3, ct->gamma, n);
    }
  } else {
    throw UnsupportedBase(
        "synth_universal requires a controlled or supercontrolled base");
  }
  dress(inner, kt.pre, kt.post);
  inner.phase += kt.phase;
  return inner;
}

/// Synthesize a target with a caller-chosen application count. Controlled
/// bases dispatch on n and the target class (n applications for h3 = 0
/// classes, the three-application or general construction otherwise);
/// supercontrolled bases accept n = 2 (h3 = 0 only) or n = 3.
inline Circuit synth_with_budget(const Mat4& target, const BaseGate& base,
                                 int n) {
  const KakDecomposition kt = kak(target);
  const double h1 = 2.0 * kt.coords.c1;
  const double h2 = 2.0 * kt.coords.c2;
  const double h3 = 2.0 * kt.coords.c3;
  Circuit inner;
  if (const auto* sc = std::get_if<SuperControlled>(&base)) {
    if (n == 2) {
      if (std::abs(h3) > 1e-9) throw OutOfRegion("h3 = 0");
      inner = synth_supercontrolled2(h1 / 2.0, h2 / 2.0, sc->alpha2);
    } else if (n == 3) {
      inner = synth_supercontrolled3(kt.coords.c1, kt.coords.c2, kt.coords.c3,
                                     sc->alpha2);
    } else {
      throw DomainError("supercontrolled base supports n = 2 or n = 3");
    }
  } else if (const auto* ct = std::get_if<Controlled>(&base)) {
    if (n < 2) throw DomainError("controlled base requires n >= 2");
    const Region region = reachable_region(base, n);
    if (auto m = region.contains(h1, h2, h3); !m.inside) {
      throw OutOfRegion(m.binding);
    }
    if (std::abs(h3) <= 1e-9) {
      inner = synth_controlled_n(h1, h2, ct->gamma, n);
    } else if (n == 3) {
      inner = synth_controlled_three(h1, h2, h3, ct->gamma);
    } else {
      inner = synth_controlled_general(h1, h2, h3, ct->gamma, n);
    }
  } else {
    throw UnsupportedBase(
        "synth_with_budget requires a controlled or supercontrolled base");
  }
  dress(inner, kt.pre, kt.post);
  inner.phase += kt.phase;
  return inner;
}

// --- Mirror rewriting ------------------------------------------------------

/// Replace the application at `index` by the mirror of its gate and
/// swap-conjugate everything applied afterwards. The recorded phase gains
/// π/4 so that evaluate(result) equals mirror_of(evaluate(c)) exactly; the
/// simulated coordinates become mirror_coords of the original ones. A
/// controlled base entry lands in the class U_d(π/4, π/4, π/4+γ/2).
inline Circuit mirror_rewrite(const Circuit& c, int index) {
  const int n = c.applications();
  if (index < 0 || index >= n) {
    throw IndexOutOfRange("mirror_rewrite: index out of range");
  }
  Circuit out = c;
  const Mat4& s = swap_gate();
  out.set_override(index, Mat4(s * c.gate_matrix(index)));
  out.phase += kQuarterPi;
  for (std::size_t j = static_cast<std::size_t>(index) + 1;
       j < out.layers.size(); ++j) {
    out.layers[j] = out.layers[j].swapped();
  }
  for (int k = index + 1; k < n; ++k) {
    const Mat4 g = c.gate_matrix(k);
    const Mat4 gs = s * g * s;
    if (max_abs_diff(gs, g) > 1e-14) out.set_override(k, gs);
  }
  return out;
}

// --- B-gate construction ---------------------------------------------------

/// Mid-chamber gate U_d(π/4, π/8, 0).
inline CanonicalCoords b_gate_coords() {
  return {kQuarterPi, kPi / 8.0, 0.0};
}

/// Whether two applications of U_d(a1/2, 0, a3/2) can reach the class of
/// U_d(π/4, π/8, 0): cos(2a1+2a3) ≤ -1/√2 and cos(2a1-2a3) ≤ 1/√2.
inline bool b_gate_feasible(double a1, double a3) {
  const double r = 1.0 / std::sqrt(2.0);
  return std::cos(2.0 * (a1 + a3)) <= -r + 1e-12 &&
         std::cos(2.0 * (a1 - a3)) <= r + 1e-12;
}

/// Build U_d(π/4, π/8, 0) from two applications of U_d(a1/2, 0, a3/2); the
/// first application is dressed by axis-exchange rotations so it acts as
/// U_d(a3/2, 0, a1/2).
inline Circuit synth_b_gate(double a1, double a3) {
  if (!b_gate_feasible(a1, a3)) {
    throw Infeasible(
        "synth_b_gate requires cos(2a1+2a3) <= -1/sqrt(2) and "
        "cos(2a1-2a3) <= 1/sqrt(2)");
  }
  const auto [s1, s2] = solve_interleaving_angles(
      {a1, 0.0, a3}, {a3, 0.0, a1}, 3.0 * kQuarterPi, kQuarterPi);

  const Mat4 u1 = canonical_gate(a1 / 2.0, 0.0, a3 / 2.0);
  const Mat2 cy = rot_y(kHalfPi);
  Circuit c;
  c.base = CustomGate{u1};
  c.layers = {LocalLayer{cy.adjoint().eval(), cy.adjoint().eval()},
              LocalLayer{Mat2(rot_y(s1) * cy), Mat2(rot_y(s2) * cy)},
              LocalLayer{}};
  const CanonicalCoords b = b_gate_coords();
  finalize_to_target(c, canonical_gate(b.c1, b.c2, b.c3));
  return c;
}

}  // namespace weyl
