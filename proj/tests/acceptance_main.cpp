// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: every check runs at its stated tolerance and prints one
// PASS/FAIL line, including the measured runtime against its budget. The
// exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "weyl/canonical.hpp"
#include "weyl/matcore.hpp"
#include "weyl/synth.hpp"
#include "weyl/verify.hpp"

using namespace weyl;

namespace {

Mat4 cnot_gate() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

Mat4 cnot_reversed() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = 1;
  m(1, 3) = 1;
  m(2, 2) = 1;
  m(3, 1) = 1;
  return m;
}

CanonicalCoords random_chamber_coords(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double c1 = unit(rng) * kQuarterPi;
  const double c2 = unit(rng) * c1;
  const double c3 = (2.0 * unit(rng) - 1.0) * c2;
  return {c1, c2, c3};
}

struct Harness {
  int failures = 0;

  void run(int id, const std::string& name, double budget_seconds,
           const std::function<bool(std::string&)>& body) {
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > budget_seconds) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("%s criterion %d: %s (%.2fs/%.0fs)%s%s\n",
                ok ? "PASS" : "FAIL", id, name.c_str(), elapsed,
                budget_seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

bool coords_close(const CanonicalCoords& a, const CanonicalCoords& b,
                  double tol) {
  return a.max_abs_diff(b) <= tol;
}

}  // namespace

int main() {
  Harness h;

  // 1. Canonical forms of the named gates.
  h.run(1, "canonical forms of named gates", 1.0, [](std::string& detail) {
    const auto c_cnot = kak(cnot_gate()).coords;
    const auto c_dcnot = kak(Mat4(cnot_gate() * cnot_reversed())).coords;
    const auto c_swap = kak(swap_gate()).coords;
    const bool ok = coords_close(c_cnot, {kQuarterPi, 0, 0}, 1e-9) &&
                    coords_close(c_dcnot, {kQuarterPi, kQuarterPi, 0}, 1e-9) &&
                    coords_close(c_swap, {kQuarterPi, kQuarterPi, kQuarterPi},
                                 1e-9);
    if (!ok) detail = "a named gate missed its canonical coordinates";
    return ok;
  });

  // 2. Eigenphase law on the magic states.
  h.run(2, "eigenphase law on 100 random coordinates", 1.0,
        [](std::string& detail) {
          Rng rng(1002);
          double worst = 0.0;
          for (int t = 0; t < 100; ++t) {
            const auto c = random_chamber_coords(rng);
            const Mat4 u = canonical_gate(c.c1, c.c2, c.c3);
            const auto lam = canonical_eigenphases(c.c1, c.c2, c.c3);
            for (int j = 1; j <= 4; ++j) {
              const Vec4 diff =
                  u * magic_state(j) -
                  phase_factor(lam[static_cast<std::size_t>(j - 1)]) *
                      magic_state(j);
              worst = std::max(worst, diff.cwiseAbs().maxCoeff());
            }
          }
          char buf[64];
          std::snprintf(buf, sizeof buf, "max deviation %.2e", worst);
          detail = buf;
          return worst <= 1e-10;
        });

  // 3. Composition-law oracle equivalence on 1000 random tuples.
  h.run(3, "composition law vs explicit products (1000 tuples)", 30.0,
        [](std::string& detail) {
          Rng rng(1003);
          std::uniform_real_distribution<double> angle(-kHalfPi, kHalfPi);
          std::uniform_real_distribution<double> local(-kPi, kPi);
          double worst = 0.0;
          for (int t = 0; t < 1000; ++t) {
            const CoordTriple a{angle(rng), angle(rng), angle(rng)};
            const CoordTriple b{angle(rng), angle(rng), angle(rng)};
            const double s1 = local(rng), s2 = local(rng);
            const auto r = compose_coords(a, b, s1, s2);
            const Mat4 product = canonical_gate(a[0] / 2, a[1] / 2, a[2] / 2) *
                                 tensor(rot_y(s1), rot_y(s2)) *
                                 canonical_gate(b[0] / 2, b[1] / 2, b[2] / 2);
            const auto want =
                weyl_normalize(r.x / 2, r.y / 2, r.z / 2).coords;
            worst = std::max(
                worst, canonical_coords(product).max_abs_diff(want));
          }
          char buf[64];
          std::snprintf(buf, sizeof buf, "max coordinate deviation %.2e",
                        worst);
          detail = buf;
          return worst <= 1e-9;
        });

  // 4. Supercontrolled universality: 500 Haar targets per alpha2.
  h.run(4, "supercontrolled universality (500 targets x 2 bases)", 60.0,
        [](std::string& detail) {
          Rng rng(1004);
          double worst = 0.0;
          bool apps_ok = true;
          for (double alpha2 : {kPi / 8.0, kPi / 6.0}) {
            for (int t = 0; t < 500; ++t) {
              const Mat4 u = haar_random_u4(rng);
              const Circuit c = synth_universal(u, SuperControlled{alpha2});
              apps_ok = apps_ok && c.applications() == 3;
              worst = std::max(worst, distance_up_to_phase(evaluate(c), u));
            }
          }
          char buf[64];
          std::snprintf(buf, sizeof buf, "max residual %.2e", worst);
          detail = buf;
          return apps_ok && worst <= 1e-8;
        });

  // 5. Controlled-gate soundness per construction and gamma.
  h.run(5, "controlled constructions (200 targets x 3 methods x 3 gammas)",
        120.0, [](std::string& detail) {
          Rng rng(1005);
          std::uniform_real_distribution<double> unit(0.0, 1.0);
          double worst = 0.0;
          bool ok = true;
          for (double gamma : {kPi / 6.0, kPi / 3.0, kHalfPi}) {
            // Uniform-n construction on the h3 = 0 plane.
            for (int t = 0; t < 200; ++t) {
              const int n = 2 + static_cast<int>(unit(rng) * 5.0);
              const double h1 = unit(rng) * std::min(kHalfPi, n * gamma);
              const double h2 = unit(rng) * std::min(h1, n * gamma - h1);
              const Circuit c = synth_controlled_n(h1, h2, gamma, n);
              ok = ok && c.applications() == n;
              worst = std::max(worst,
                               canonical_coords(evaluate(c))
                                   .max_abs_diff(
                                       weyl_normalize(h1 / 2, h2 / 2, 0)
                                           .coords));
            }
            // Three-application construction inside its subregion.
            for (int t = 0; t < 200; ++t) {
              const double h2 = unit(rng) * std::min(gamma, kHalfPi);
              const double h3 = (2.0 * unit(rng) - 1.0) * h2;
              const double cap = std::min(3.0 * gamma - std::abs(h3), kPi);
              const double h1 =
                  h2 + unit(rng) * std::max(0.0, std::min({kHalfPi - h2,
                                                           cap - 2.0 * h2}));
              const Circuit c = synth_controlled_three(h1, h2, h3, gamma);
              ok = ok && c.applications() == 3;
              worst = std::max(
                  worst, canonical_coords(evaluate(c))
                             .max_abs_diff(
                                 weyl_normalize(h1 / 2, h2 / 2, h3 / 2)
                                     .coords));
            }
            // General construction with n >= 4.
            for (int t = 0; t < 200; ++t) {
              const int n = 4 + static_cast<int>(unit(rng) * 4.0);
              const double h1 = unit(rng) * std::min(kHalfPi, n * gamma);
              const double h2 =
                  unit(rng) * std::min(h1, n * gamma - h1);
              double h3 =
                  unit(rng) * std::min(h2, n * gamma - h1 - h2);
              if (t % 2 == 1) h3 = -h3;
              const Circuit c =
                  synth_controlled_general(h1, h2, h3, gamma, n);
              ok = ok && c.applications() == n;
              worst = std::max(
                  worst, canonical_coords(evaluate(c))
                             .max_abs_diff(
                                 weyl_normalize(h1 / 2, h2 / 2, h3 / 2)
                                     .coords));
            }
          }
          char buf[64];
          std::snprintf(buf, sizeof buf,
                        "max local-equivalence residual %.2e", worst);
          detail = buf;
          return ok && worst <= 1e-8;
        });

  // 6. Mirror rewriting: each rewrite mirrors the simulated gate; rewriting every
  // application of a CNOT-class universal synthesis yields a universal
  // family over the mirrored base class.
  h.run(6, "mirror rewriting (100 circuits x 3 indices + universality)", 60.0,
        [](std::string& detail) {
          double worst = 0.0;
          for (int t = 0; t < 100; ++t) {
            const Circuit c = random_circuit(
                Controlled{kHalfPi}, 3, split_seed(1006, static_cast<std::uint64_t>(t)));
            const auto want = mirror_coords(canonical_coords(evaluate(c)));
            for (int i = 0; i < 3; ++i) {
              const Circuit m = mirror_rewrite(c, i);
              worst = std::max(
                  worst, canonical_coords(evaluate(m)).max_abs_diff(want));
            }
          }
          if (worst > 1e-9) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "rewrite residual %.2e", worst);
            detail = buf;
            return false;
          }

          // Mirrored universality: rewrite all three applications.
          Rng rng(1007);
          const auto dcnot_class =
              CanonicalCoords{kQuarterPi, kQuarterPi, 0.0};
          double worst_u = 0.0;
          bool gates_ok = true;
          for (int t = 0; t < 25; ++t) {
            const Mat4 target = haar_random_u4(rng);
            Circuit c = synth_universal(target, Controlled{kHalfPi});
            const Mat4 before = evaluate(c);
            for (int i = 0; i < c.applications(); ++i) {
              c = mirror_rewrite(c, i);
            }
            for (int i = 0; i < c.applications(); ++i) {
              gates_ok = gates_ok &&
                         coords_close(canonical_coords(c.gate_matrix(i)),
                                      dcnot_class, 1e-9);
            }
            // Three rewrites compose to a single mirror of the simulation;
            // the rewritten circuit still reproduces its gate exactly up to
            // phase.
            const auto want =
                mirror_coords(canonical_coords(target));
            worst_u = std::max(
                worst_u, canonical_coords(evaluate(c)).max_abs_diff(want));
            worst_u = std::max(
                worst_u, distance_up_to_phase(
                             evaluate(c), mirror_of(mirror_of(mirror_of(
                                              before)))));
          }
          char buf[64];
          std::snprintf(buf, sizeof buf, "universality residual %.2e",
                        worst_u);
          detail = buf;
          return gates_ok && worst_u <= 1e-8;
        });

  // 7. Region necessity scans.
  h.run(7, "necessity scans (1000 trials x 4 gammas x 3 budgets)", 120.0,
        [](std::string& detail) {
          std::uint64_t idx = 0;
          for (double gamma : {kPi / 6.0, kQuarterPi, kPi / 3.0, kHalfPi}) {
            for (int n : {2, 3, 4}) {
              const auto report = necessity_scan(Controlled{gamma}, n, 1000,
                                                 split_seed(1008, idx++));
              if (!report.passed()) {
                detail = "violation at gamma=" + std::to_string(gamma) +
                         " n=" + std::to_string(n);
                return false;
              }
            }
          }
          return true;
        });

  // 8. B gate from two applications of a feasible base.
  h.run(8, "B gate from two applications", 1.0, [](std::string& detail) {
    const double a1 = 3.0 * kPi / 8.0, a3 = kPi / 8.0;
    if (!b_gate_feasible(a1, a3)) {
      detail = "reference parameters flagged infeasible";
      return false;
    }
    const Circuit c = synth_b_gate(a1, a3);
    const auto got = canonical_coords(evaluate(c));
    if (c.applications() != 2 ||
        !coords_close(got, {kQuarterPi, kPi / 8.0, 0.0}, 1e-8)) {
      detail = "wrong class or application count";
      return false;
    }
    bool rejected = false;
    try {
      synth_b_gate(0.0, 0.0);
    } catch (const Infeasible&) {
      rejected = true;
    }
    if (!rejected) detail = "infeasible parameters were not rejected";
    return rejected;
  });

  // 9. Universality budget formula.
  h.run(9, "application budget formula", 1.0, [](std::string& detail) {
    const bool ok = universal_budget(kHalfPi) == 3 &&
                    universal_budget(kQuarterPi) == 6 &&
                    universal_budget(kPi / 3.0) == 5;
    if (!ok) detail = "budget mismatch";
    return ok;
  });

  if (h.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", h.failures);
  }
  return h.failures;
}
