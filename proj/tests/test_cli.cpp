// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line binary. The binary path arrives in
// WEYL_CLI_BIN (set by CTest); the tests are skipped when it is absent.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "test_support.hpp"
#include "weyl/io.hpp"
#include "weyl/verify.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("WEYL_CLI_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_dir() {
  static std::string dir = [] {
    std::string templ = "/tmp/weyl_cli_test_XXXXXX";
    char* made = mkdtemp(templ.data());
    REQUIRE(made != nullptr);
    return std::string(made);
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = temp_dir() + "/" + name;
  std::ofstream out(path);
  REQUIRE(out.good());
  out << content;
  return path;
}

bool have_cli() { return std::getenv("WEYL_CLI_BIN") != nullptr; }

}  // namespace

TEST_CASE("canon subcommand", "[cli]") {
  if (!have_cli()) SKIP("WEYL_CLI_BIN not set");
  const std::string cnot_path =
      write_file("cnot.json", weyl::matrix_to_json(weyl::test::cnot_gate()).dump());

  const auto r = run_cli("canon " + cnot_path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("coords: (0.78539816339744") != std::string::npos);
  CHECK(r.output.find("residual:") != std::string::npos);

  SECTION("parse failure exits 2") {
    const std::string bad = write_file("bad.json", "{not json");
    CHECK(run_cli("canon " + bad).exit_code == 2);
  }
  SECTION("non-unitary input exits 3") {
    weyl::Mat4 m = 2.0 * weyl::Mat4::Identity();
    const std::string path =
        write_file("nonunitary.json", weyl::matrix_to_json(m).dump());
    CHECK(run_cli("canon " + path).exit_code == 3);
  }
}

TEST_CASE("synth then verify pipeline", "[cli]") {
  if (!have_cli()) SKIP("WEYL_CLI_BIN not set");
  const std::string circuit_path = temp_dir() + "/circuit.json";

  const auto synth = run_cli(
      "synth --coords pi/4,pi/8,0 --base supercontrolled:pi/8 --out " +
      circuit_path);
  CHECK(synth.exit_code == 0);
  const weyl::Circuit c =
      weyl::circuit_from_json(weyl::load_json_file(circuit_path));
  CHECK(c.applications() == 3);

  const weyl::Mat4 target =
      weyl::canonical_gate(weyl::kQuarterPi, weyl::kPi / 8.0, 0.0);
  const std::string target_path =
      write_file("target.json", weyl::matrix_to_json(target).dump());
  const auto verify = run_cli("verify --circuit " + circuit_path +
                              " --target " + target_path + " --mode exact");
  CHECK(verify.exit_code == 0);
  CHECK(verify.output.find("PASS") != std::string::npos);

  SECTION("a mismatched target fails with exit 4") {
    const std::string swap_path =
        write_file("swap.json", weyl::matrix_to_json(weyl::swap_gate()).dump());
    const auto bad = run_cli("verify --circuit " + circuit_path +
                             " --target " + swap_path);
    CHECK(bad.exit_code == 4);
    CHECK(bad.output.find("FAIL") != std::string::npos);
  }
}

TEST_CASE("synth budget dispatch and region errors", "[cli]") {
  if (!have_cli()) SKIP("WEYL_CLI_BIN not set");
  const auto budget =
      run_cli("synth --coords pi/4,pi/4,pi/4 --base controlled:pi/2");
  CHECK(budget.exit_code == 0);
  const weyl::Circuit c = weyl::circuit_from_json(weyl::Json::parse(budget.output));
  CHECK(c.applications() == 3);

  const auto out_of_region =
      run_cli("synth --coords 0.4,0.3,0.2 --base controlled:0.5 --n 2");
  CHECK(out_of_region.exit_code == 5);
}

TEST_CASE("mirror subcommand", "[cli]") {
  if (!have_cli()) SKIP("WEYL_CLI_BIN not set");
  const std::string cnot_path =
      write_file("cnot_m.json", weyl::matrix_to_json(weyl::test::cnot_gate()).dump());
  const auto gate = run_cli("mirror --gate " + cnot_path);
  CHECK(gate.exit_code == 0);
  CHECK(gate.output.find("mirror_coords: (0.78539816339744") !=
        std::string::npos);

  const weyl::Circuit c =
      weyl::random_circuit(weyl::Controlled{weyl::kHalfPi}, 3, 202);
  const std::string circuit_path =
      write_file("circ_m.json", weyl::circuit_to_json(c).dump());
  const auto rewritten =
      run_cli("mirror --circuit " + circuit_path + " --index 1");
  CHECK(rewritten.exit_code == 0);
  const weyl::Circuit m =
      weyl::circuit_from_json(weyl::Json::parse(rewritten.output));
  const auto want = weyl::mirror_coords(weyl::canonical_coords(weyl::evaluate(c)));
  CHECK(weyl::canonical_coords(weyl::evaluate(m)).max_abs_diff(want) <= 1e-9);

  SECTION("index out of range exits 6") {
    CHECK(run_cli("mirror --circuit " + circuit_path + " --index 7").exit_code ==
          6);
  }
}

TEST_CASE("reach subcommand", "[cli]") {
  if (!have_cli()) SKIP("WEYL_CLI_BIN not set");
  const auto r2 = run_cli("reach --base controlled:pi/2 --n 2");
  CHECK(r2.exit_code == 0);
  CHECK(r2.output.find("h3 = 0") != std::string::npos);
  CHECK(r2.output.find("h1+h2 <= ") != std::string::npos);

  const auto inside = run_cli("reach --base controlled:pi/2 --n 2 --point 0,0,0");
  CHECK(inside.output.find("INSIDE") != std::string::npos);

  const auto outside = run_cli(
      "reach --base controlled:pi/4 --n 3 --point pi/2,pi/2,pi/2");
  CHECK(outside.output.find("OUTSIDE") != std::string::npos);
  CHECK(outside.output.find("h1+h2+|h3| <= n*gamma") != std::string::npos);

  CHECK(run_cli("reach --base supercontrolled:0.1 --n 2").exit_code == 5);
}

TEST_CASE("sweep subcommand", "[cli]") {
  if (!have_cli()) SKIP("WEYL_CLI_BIN not set");
  const std::string report_path = temp_dir() + "/report.json";
  const auto r = run_cli(
      "sweep --suite roundtrip --trials 100 --seed 3 --out " + report_path);
  CHECK(r.exit_code == 0);
  const weyl::Json report = weyl::load_json_file(report_path);
  CHECK(report.at("passed") == true);
  CHECK(report.at("suite") == "roundtrip");

  const auto nec = run_cli("sweep --suite necessity --trials 100 --seed 1");
  CHECK(nec.exit_code == 0);
  const auto cross = run_cli("sweep --suite crossmethod --trials 100 --seed 2");
  CHECK(cross.exit_code == 0);
}
