// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface: canonical analysis, circuit synthesis, mirror
// rewriting, reachable-region queries and verification sweeps over JSON
// documents. Documents go to stdout, diagnostics to stderr.
//
// Exit codes: 0 success, 2 parse error, 3 non-unitary input, 4 residual
// above tolerance, 5 out of region / unsupported base / infeasible,
// 6 index out of range.

#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weyl/canonical.hpp"
#include "weyl/io.hpp"
#include "weyl/matcore.hpp"
#include "weyl/synth.hpp"
#include "weyl/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNonUnitary = 3;
constexpr int kExitResidual = 4;
constexpr int kExitRegion = 5;
constexpr int kExitIndex = 6;

void emit_document(const weyl::Json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw weyl::ParseError("cannot write file: " + out_path);
  out << doc.dump(2) << "\n";
}

std::string format_coords(const weyl::CanonicalCoords& c) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << c.c1 << ", " << c.c2 << ", " << c.c3 << ")";
  return os.str();
}

void print_mat2(std::ostream& os, const char* name, const weyl::Mat2& m) {
  os.precision(17);
  os << name << ":";
  for (int r = 0; r < 2; ++r) {
    os << " [";
    for (int c = 0; c < 2; ++c) {
      os << "(" << m(r, c).real() << (m(r, c).imag() < 0 ? "" : "+")
         << m(r, c).imag() << "i)" << (c == 0 ? ", " : "");
    }
    os << "]";
  }
  os << "\n";
}

weyl::Mat4 load_gate(const std::string& path, double utol) {
  const weyl::Json j = weyl::load_json_file(path);
  const weyl::Mat4 u = weyl::matrix4_from_json(j, "gate document");
  weyl::require_unitary(u, utol, "gate document");
  return u;
}

int cmd_canon(const std::string& path, double utol) {
  const weyl::Mat4 u = load_gate(path, utol);
  const weyl::KakDecomposition k = weyl::kak(u, utol);
  std::cout.precision(17);
  std::cout << "coords: " << format_coords(k.coords) << "\n";
  std::cout << "coords_pi4: (" << k.coords.c1 / weyl::kQuarterPi << ", "
            << k.coords.c2 / weyl::kQuarterPi << ", "
            << k.coords.c3 / weyl::kQuarterPi << ")*pi/4\n";
  std::cout << "phase: " << k.phase << "\n";
  print_mat2(std::cout, "pre_a", k.pre.a);
  print_mat2(std::cout, "pre_b", k.pre.b);
  print_mat2(std::cout, "post_a", k.post.a);
  print_mat2(std::cout, "post_b", k.post.b);
  const auto inv = weyl::local_invariant(u, utol);
  std::cout << "invariant_phases: (" << inv.phases[0] << ", " << inv.phases[1]
            << ", " << inv.phases[2] << ", " << inv.phases[3] << ")\n";
  std::cout << "residual: " << weyl::max_abs_diff(k.reconstruct(), u) << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string target_path;
  std::string coords_text;
  std::string base_text;
  int n = -1;
  std::string out_path;
};

int cmd_synth(const SynthArgs& args, double tol, double utol) {
  weyl::Mat4 target;
  if (!args.target_path.empty()) {
    target = load_gate(args.target_path, utol);
  } else {
    const auto c = weyl::parse_coords(args.coords_text);
    target = weyl::canonical_gate(c[0], c[1], c[2]);
  }
  const weyl::BaseGate base = weyl::parse_base(args.base_text);
  weyl::validate_base(base);

  weyl::Circuit circuit;
  if (args.n > 0) {
    circuit = weyl::synth_with_budget(target, base, args.n);
  } else {
    circuit = weyl::synth_universal(target, base);
  }
  std::string route;
  if (std::holds_alternative<weyl::SuperControlled>(base)) {
    route = "supercontrolled-" + std::to_string(circuit.applications());
  } else {
    const int n = circuit.applications();
    const double h3 = 2.0 * weyl::canonical_coords(target).c3;
    if (std::abs(h3) <= 1e-9) {
      route = "controlled-n n=" + std::to_string(n);
    } else {
      route = n == 3 ? "controlled-three"
                     : "controlled-general n=" + std::to_string(n);
    }
  }
  const double residual =
      weyl::distance_up_to_phase(weyl::evaluate(circuit), target);
  emit_document(weyl::circuit_to_json(circuit), args.out_path);
  std::cerr.precision(17);
  std::cerr << "route: " << route << "\n";
  std::cerr << "applications: " << circuit.applications() << "\n";
  std::cerr << "residual: " << residual << "\n";
  return residual <= tol ? kExitOk : kExitResidual;
}

struct MirrorArgs {
  std::string gate_path;
  std::string circuit_path;
  int index = 0;
  std::string out_path;
};

int cmd_mirror(const MirrorArgs& args, double utol) {
  if (!args.gate_path.empty()) {
    const weyl::Mat4 u = load_gate(args.gate_path, utol);
    const weyl::CanonicalCoords c = weyl::canonical_coords(u, utol);
    const weyl::CanonicalCoords m = weyl::mirror_coords(c);
    std::cout.precision(17);
    std::cout << "coords: " << format_coords(c) << "\n";
    std::cout << "mirror_coords: " << format_coords(m) << "\n";
    return kExitOk;
  }
  const weyl::Circuit c =
      weyl::circuit_from_json(weyl::load_json_file(args.circuit_path));
  const weyl::CanonicalCoords before =
      weyl::canonical_coords(weyl::evaluate(c));
  const weyl::Circuit rewritten = weyl::mirror_rewrite(c, args.index);
  const weyl::CanonicalCoords after =
      weyl::canonical_coords(weyl::evaluate(rewritten));
  emit_document(weyl::circuit_to_json(rewritten), args.out_path);
  std::cerr.precision(17);
  std::cerr << "before: " << format_coords(before) << "\n";
  std::cerr << "after: " << format_coords(after) << "\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string circuit_path;
  std::string target_path;
  std::string mode = "exact";
};

int cmd_verify(const VerifyArgs& args, double tol, double utol) {
  const weyl::Circuit c =
      weyl::circuit_from_json(weyl::load_json_file(args.circuit_path));
  const weyl::Mat4 target = load_gate(args.target_path, utol);
  const weyl::CheckMode mode = args.mode == "local"
                                   ? weyl::CheckMode::local_equiv
                                   : weyl::CheckMode::exact_phase;
  const weyl::VerifyReport report = weyl::check_circuit(c, target, mode, tol);
  std::cout.precision(17);
  std::cout << "residual: " << report.max_residual << "\n";
  std::cout << (report.passed() ? "PASS" : "FAIL") << "\n";
  return report.passed() ? kExitOk : kExitResidual;
}

struct ReachArgs {
  std::string base_text;
  int n = 2;
  std::string point_text;
};

int cmd_reach(const ReachArgs& args) {
  const weyl::BaseGate base = weyl::parse_base(args.base_text);
  const weyl::Region region = weyl::reachable_region(base, args.n);
  for (const std::string& line : region.describe()) {
    std::cout << line << "\n";
  }
  if (!args.point_text.empty()) {
    const auto h = weyl::parse_coords(args.point_text);
    const auto m = region.contains(h[0], h[1], h[2]);
    if (m.inside) {
      std::cout << "INSIDE\n";
      if (region.sufficiency == weyl::Region::Sufficiency::three_app_subset) {
        const auto s = region.sufficient_contains(h[0], h[1], h[2]);
        std::cout << (s.inside ? "constructive subregion: yes\n"
                               : "constructive subregion: no (" + s.binding +
                                     ")\n");
      }
    } else {
      std::cout << "OUTSIDE (binding: " << m.binding << ")\n";
    }
  }
  return kExitOk;
}

struct SweepArgs {
  std::string suite;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string out_path;
};

int cmd_sweep(const SweepArgs& args) {
  weyl::Json cases = weyl::Json::array();
  bool all_passed = true;
  const std::array<double, 4> gammas{weyl::kPi / 6.0, weyl::kQuarterPi,
                                     weyl::kPi / 3.0, weyl::kHalfPi};

  if (args.suite == "necessity") {
    std::uint64_t idx = 0;
    for (double gamma : gammas) {
      for (int n : {2, 3, 4}) {
        const auto report = weyl::necessity_scan(
            weyl::Controlled{gamma}, n, args.trials,
            weyl::split_seed(args.seed, idx++));
        weyl::Json entry = report.to_json();
        entry["gamma"] = gamma;
        entry["n"] = n;
        cases.push_back(entry);
        all_passed = all_passed && report.passed();
        std::cerr << "necessity gamma=" << gamma << " n=" << n << " "
                  << (report.passed() ? "PASS" : "FAIL") << "\n";
      }
    }
  } else if (args.suite == "roundtrip") {
    weyl::VerifyReport report;
    report.mode = weyl::CheckMode::exact_phase;
    report.trials = args.trials;
    report.tolerance = weyl::kEqTol;
    for (int t = 0; t < args.trials; ++t) {
      const std::uint64_t s = weyl::split_seed(args.seed, static_cast<std::uint64_t>(t));
      const weyl::Mat4 u = weyl::haar_random_u4(s);
      const double residual =
          weyl::max_abs_diff(weyl::kak(u).reconstruct(), u);
      report.record(s, "kak round-trip", residual);
    }
    cases.push_back(report.to_json());
    all_passed = report.passed();
    std::cerr << report.to_text();
  } else if (args.suite == "crossmethod") {
    weyl::Rng rng(args.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    weyl::VerifyReport merged;
    merged.mode = weyl::CheckMode::local_equiv;
    merged.trials = args.trials;
    merged.tolerance = weyl::kEndToEndTol;
    for (int t = 0; t < args.trials; ++t) {
      const double gamma = t % 2 == 0 ? weyl::kHalfPi : weyl::kPi / 3.0;
      // Sample inside the overlap of all routes (h3 = 0, h2 <= gamma,
      // h1+h2 <= min(3*gamma, pi)).
      const double h1 = unit(rng) * weyl::kHalfPi;
      const double h2 =
          unit(rng) * std::min({h1, gamma, weyl::kPi - h1, 3.0 * gamma - h1});
      const auto report = weyl::cross_method_check(
          weyl::CanonicalCoords{h1 / 2.0, h2 / 2.0, 0.0}, gamma,
          weyl::split_seed(args.seed, static_cast<std::uint64_t>(t)));
      for (const auto& f : report.failures) merged.failures.push_back(f);
      merged.max_residual = std::max(merged.max_residual, report.max_residual);
    }
    cases.push_back(merged.to_json());
    all_passed = merged.passed();
    std::cerr << merged.to_text();
  } else {
    throw weyl::ParseError("unknown suite '" + args.suite + "'");
  }

  const weyl::Json doc{{"suite", args.suite},
                       {"trials", args.trials},
                       {"seed", args.seed},
                       {"passed", all_passed},
                       {"cases", cases}};
  emit_document(doc, args.out_path);
  return all_passed ? kExitOk : kExitResidual;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canonical forms and simulation circuits for two-qubit gates"};
  app.require_subcommand(1);

  const double tol = weyl::env_tolerance(weyl::kEndToEndTol);
  const double utol = weyl::env_tolerance(weyl::kUnitaryTol);

  std::string canon_path;
  auto* canon = app.add_subcommand("canon", "Canonical coordinates of a gate");
  canon->add_option("matrix", canon_path, "4x4 matrix document")->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Synthesize a simulation circuit");
  auto* topt = synth->add_option("--target", synth_args.target_path,
                                 "target gate document");
  synth->add_option("--coords", synth_args.coords_text,
                    "target canonical coordinates c1,c2,c3")
      ->excludes(topt);
  synth->add_option("--base", synth_args.base_text,
                    "controlled:<angle> or supercontrolled:<angle>")
      ->required();
  synth->add_option("--n", synth_args.n, "application budget");
  synth->add_option("--out", synth_args.out_path, "write circuit here");

  MirrorArgs mirror_args;
  auto* mirror = app.add_subcommand("mirror", "Mirror a gate or circuit");
  auto* gopt =
      mirror->add_option("--gate", mirror_args.gate_path, "gate document");
  mirror->add_option("--circuit", mirror_args.circuit_path,
                     "circuit document")
      ->excludes(gopt);
  mirror->add_option("--index", mirror_args.index,
                     "application to replace (circuit mode)");
  mirror->add_option("--out", mirror_args.out_path, "write circuit here");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Check a circuit against a target");
  verify->add_option("--circuit", verify_args.circuit_path)->required();
  verify->add_option("--target", verify_args.target_path)->required();
  verify->add_option("--mode", verify_args.mode, "exact | local")
      ->check(CLI::IsMember({"exact", "local"}));
  double verify_tol = tol;
  verify->add_option("--tol", verify_tol, "residual tolerance");

  ReachArgs reach_args;
  auto* reach = app.add_subcommand("reach", "Reachable-region queries");
  reach->add_option("--base", reach_args.base_text)->required();
  reach->add_option("--n", reach_args.n)->required();
  reach->add_option("--point", reach_args.point_text, "h1,h2,h3");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Verification sweeps");
  sweep->add_option("--suite", sweep_args.suite,
                    "necessity | roundtrip | crossmethod")
      ->required();
  sweep->add_option("--trials", sweep_args.trials);
  sweep->add_option("--seed", sweep_args.seed);
  sweep->add_option("--out", sweep_args.out_path, "write report here");

  try {
    app.parse(argc, argv);
    if (canon->parsed()) return cmd_canon(canon_path, utol);
    if (synth->parsed()) {
      if (synth_args.target_path.empty() && synth_args.coords_text.empty()) {
        throw weyl::ParseError("synth requires --target or --coords");
      }
      return cmd_synth(synth_args, tol, utol);
    }
    if (mirror->parsed()) {
      if (mirror_args.gate_path.empty() && mirror_args.circuit_path.empty()) {
        throw weyl::ParseError("mirror requires --gate or --circuit");
      }
      return cmd_mirror(mirror_args, utol);
    }
    if (verify->parsed()) return cmd_verify(verify_args, verify_tol, utol);
    if (reach->parsed()) return cmd_reach(reach_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const weyl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const weyl::MalformedCircuit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const weyl::NonUnitaryInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonUnitary;
  } catch (const weyl::IndexOutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIndex;
  } catch (const weyl::Error& e) {
    // OutOfRegion, Infeasible, DomainError, UnsupportedBase, numerical.
    std::cerr << "error: " << e.what() << "\n";
    return kExitRegion;
  }
}
