// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weyl/canonical.hpp"
#include "weyl/matcore.hpp"
#include "weyl/synth.hpp"

namespace weyl {

enum class CheckMode { exact_phase, local_equiv, region };

inline const char* to_string(CheckMode m) {
  switch (m) {
    case CheckMode::exact_phase:
      return "exact_phase";
    case CheckMode::local_equiv:
      return "local_equiv";
    case CheckMode::region:
      return "region";
  }
  return "unknown";
}

/// Outcome of a residual sweep. Failures keep the seed so that any failing
/// trial is a one-command reproduction.
struct VerifyReport {
  struct Failure {
    std::uint64_t seed = 0;
    std::string input;
    double residual = 0.0;
  };

  CheckMode mode = CheckMode::exact_phase;
  int trials = 0;
  double tolerance = 0.0;
  double max_residual = 0.0;
  std::vector<Failure> failures;

  bool passed() const { return failures.empty(); }

  void record(std::uint64_t seed, const std::string& input, double residual) {
    max_residual = std::max(max_residual, residual);
    if (residual > tolerance) failures.push_back({seed, input, residual});
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["mode"] = to_string(mode);
    j["trials"] = trials;
    j["tolerance"] = tolerance;
    j["max_residual"] = max_residual;
    j["passed"] = passed();
    j["failures"] = nlohmann::json::array();
    for (const auto& f : failures) {
      j["failures"].push_back(
          {{"seed", f.seed}, {"input", f.input}, {"residual", f.residual}});
    }
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "mode=" << to_string(mode) << " trials=" << trials
       << " tolerance=" << tolerance << " max_residual=" << max_residual
       << " result=" << (passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& f : failures) {
      os << "  failure seed=" << f.seed << " residual=" << f.residual << " "
         << f.input << "\n";
    }
    return os.str();
  }
};

/// Default end-to-end tolerance: two canonical decompositions compound
/// roundoff.
inline constexpr double kEndToEndTol = 1e-8;

/// Circuit with Haar-random local layers, deterministic in the seed.
inline Circuit random_circuit(const BaseGate& base, int n,
                              std::uint64_t seed) {
  if (n < 0) throw DomainError("random_circuit requires n >= 0");
  validate_base(base);
  Rng rng(seed);
  Circuit c;
  c.base = base;
  c.layers.clear();
  for (int j = 0; j <= n; ++j) {
    c.layers.push_back(LocalLayer{haar_random_u2(rng), haar_random_u2(rng)});
  }
  return c;
}

/// Compare a circuit's evaluation against a target gate, either up to global
/// phase or at the level of normalized coordinates.
inline VerifyReport check_circuit(const Circuit& c, const Mat4& target,
                                  CheckMode mode, double tol = kEndToEndTol) {
  require_unitary(target, kUnitaryTol, "check_circuit target");
  VerifyReport report;
  report.mode = mode;
  report.trials = 1;
  report.tolerance = tol;
  const Mat4 got = evaluate(c);
  double residual = 0.0;
  if (mode == CheckMode::exact_phase) {
    residual = distance_up_to_phase(got, target);
  } else {
    residual = canonical_coords(got).max_abs_diff(canonical_coords(target));
  }
  report.record(0, "circuit vs target", residual);
  return report;
}

/// Monte-Carlo compliance scan of the necessary reachable-region predicate:
/// random circuits of n controlled-gate applications must land at normalized
/// coordinates inside the region, within slack.
inline VerifyReport necessity_scan(const BaseGate& base, int n, int trials,
                                   std::uint64_t seed, double tol = 1e-9) {
  const auto* ct = std::get_if<Controlled>(&base);
  if (ct == nullptr) {
    throw UnsupportedBase("necessity_scan requires a controlled base gate");
  }
  if (n < 2) throw DomainError("necessity_scan requires n >= 2");
  const double gamma = ct->gamma;

  VerifyReport report;
  report.mode = CheckMode::region;
  report.trials = trials;
  report.tolerance = tol;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = split_seed(seed, static_cast<std::uint64_t>(t));
    const Circuit c = random_circuit(base, n, trial_seed);
    const CanonicalCoords coords = canonical_coords(evaluate(c));
    double violation = 0.0;
    if (n == 2) {
      violation = std::max(std::abs(coords.c3),
                           coords.c1 + coords.c2 - gamma);
    } else {
      violation =
          coords.c1 + coords.c2 + std::abs(coords.c3) - n * gamma / 2.0;
    }
    violation = std::max(violation, 0.0);
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n << " gamma=" << gamma << " coords=(" << coords.c1 << ","
       << coords.c2 << "," << coords.c3 << ")";
    report.record(trial_seed, os.str(), violation);
  }
  return report;
}

/// Build the same target through every applicable controlled-gate route
/// (three-application, general n=4, uniform-n with h3=0, and the
/// two-application supercontrolled route) and require local equivalence to
/// the target within tolerance. The target must lie in the overlap of the
/// routes' preconditions, which forces c3 ≈ 0.
inline VerifyReport cross_method_check(const CanonicalCoords& target,
                                       double gamma, std::uint64_t seed,
                                       double tol = kEndToEndTol) {
  const double h1 = 2.0 * target.c1;
  const double h2 = 2.0 * target.c2;
  const double h3 = 2.0 * target.c3;
  if (std::abs(h3) > 1e-9) {
    throw OutOfRegion("cross-method overlap requires h3 = 0");
  }
  const Region r4 = reachable_region(Controlled{gamma}, 4);
  if (auto m = r4.contains(h1, h2, 0.0); !m.inside) {
    throw OutOfRegion(m.binding);
  }
  const Region r3 = reachable_region(Controlled{gamma}, 3);
  if (auto m = r3.sufficient_contains(h1, h2, 0.0); !m.inside) {
    throw OutOfRegion(m.binding);
  }

  VerifyReport report;
  report.mode = CheckMode::local_equiv;
  report.tolerance = tol;
  const Mat4 want = canonical_gate(target.c1, target.c2, target.c3);
  const CanonicalCoords want_coords = canonical_coords(want);

  struct Route {
    const char* name;
    Circuit circuit;
  };
  std::vector<Route> routes;
  routes.push_back({"controlled-three", synth_controlled_three(h1, h2, 0.0, gamma)});
  routes.push_back(
      {"controlled-general-4", synth_controlled_general(h1, h2, 0.0, gamma, 4)});
  routes.push_back({"controlled-n-4", synth_controlled_n(h1, h2, gamma, 4)});
  routes.push_back(
      {"supercontrolled-2", synth_supercontrolled2(h1 / 2.0, h2 / 2.0, kPi / 8.0)});

  report.trials = static_cast<int>(routes.size());
  for (const auto& route : routes) {
    const CanonicalCoords got = canonical_coords(evaluate(route.circuit));
    report.record(seed, route.name, got.max_abs_diff(want_coords));
  }
  return report;
}

}  // namespace weyl
