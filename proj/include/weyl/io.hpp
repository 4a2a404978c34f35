// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "weyl/matcore.hpp"
#include "weyl/synth.hpp"

namespace weyl {

using Json = nlohmann::json;

// --- Matrix documents ------------------------------------------------------
//
// { "shape": 2 | 4, "entries": [[re, im], ...] }  row-major, shape² entries.

namespace detail {

template <typename Mat>
Json matrix_to_json_impl(const Mat& m, int shape) {
  Json entries = Json::array();
  for (int r = 0; r < shape; ++r) {
    for (int c = 0; c < shape; ++c) {
      entries.push_back({m(r, c).real(), m(r, c).imag()});
    }
  }
  return Json{{"shape", shape}, {"entries", entries}};
}

template <typename Mat>
Mat matrix_from_json_impl(const Json& j, int shape, const char* what) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("entries")) {
    throw ParseError(std::string(what) +
                     ": expected {shape, entries} matrix document");
  }
  if (j.at("shape").get<int>() != shape) {
    throw ParseError(std::string(what) + ": unexpected matrix shape");
  }
  const Json& entries = j.at("entries");
  if (!entries.is_array() ||
      entries.size() != static_cast<std::size_t>(shape * shape)) {
    throw ParseError(std::string(what) + ": entries must hold shape^2 pairs");
  }
  Mat m;
  for (int r = 0; r < shape; ++r) {
    for (int c = 0; c < shape; ++c) {
      const Json& e = entries[static_cast<std::size_t>(r * shape + c)];
      if (!e.is_array() || e.size() != 2) {
        throw ParseError(std::string(what) + ": entry must be [re, im]");
      }
      const double re = e[0].get<double>();
      const double im = e[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw ParseError(std::string(what) + ": entries must be finite");
      }
      m(r, c) = Complex{re, im};
    }
  }
  return m;
}

}  // namespace detail

inline Json matrix_to_json(const Mat2& m) {
  return detail::matrix_to_json_impl(m, 2);
}
inline Json matrix_to_json(const Mat4& m) {
  return detail::matrix_to_json_impl(m, 4);
}

inline Mat2 matrix2_from_json(const Json& j, const char* what = "matrix") {
  return detail::matrix_from_json_impl<Mat2>(j, 2, what);
}
inline Mat4 matrix4_from_json(const Json& j, const char* what = "matrix") {
  return detail::matrix_from_json_impl<Mat4>(j, 4, what);
}

// --- Circuit documents -----------------------------------------------------
//
// {
//   "phase": <double>,
//   "applications": <int>,
//   "base": { "kind": "controlled"|"supercontrolled"|"custom",
//             "gamma"|"alpha2": <double> | "matrix": <matrix doc>,
//             "overrides": [{"index": <int>, "matrix": <matrix doc>}, ...] },
//   "layers": [ {"a": <matrix doc 2>, "b": <matrix doc 2>}, ... ]  // n+1
// }

inline Json circuit_to_json(const Circuit& c) {
  Json base;
  if (const auto* ct = std::get_if<Controlled>(&c.base)) {
    base["kind"] = "controlled";
    base["gamma"] = ct->gamma;
  } else if (const auto* sc = std::get_if<SuperControlled>(&c.base)) {
    base["kind"] = "supercontrolled";
    base["alpha2"] = sc->alpha2;
  } else {
    base["kind"] = "custom";
    base["matrix"] = matrix_to_json(std::get<CustomGate>(c.base).matrix);
  }
  if (!c.overrides.empty()) {
    Json ov = Json::array();
    for (int k = 0; k < c.applications(); ++k) {
      const auto& slot = c.overrides[static_cast<std::size_t>(k)];
      if (slot) {
        ov.push_back({{"index", k}, {"matrix", matrix_to_json(*slot)}});
      }
    }
    if (!ov.empty()) base["overrides"] = ov;
  }
  Json layers = Json::array();
  for (const LocalLayer& l : c.layers) {
    layers.push_back(
        {{"a", matrix_to_json(l.a)}, {"b", matrix_to_json(l.b)}});
  }
  return Json{{"phase", c.phase},
              {"applications", c.applications()},
              {"base", base},
              {"layers", layers}};
}

inline Circuit circuit_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("base") || !j.contains("layers")) {
    throw ParseError("circuit document: expected {phase, base, layers}");
  }
  Circuit c;
  c.phase = j.value("phase", 0.0);
  if (!std::isfinite(c.phase)) {
    throw ParseError("circuit document: phase must be finite");
  }
  const Json& base = j.at("base");
  const std::string kind = base.value("kind", "");
  if (kind == "controlled") {
    c.base = Controlled{base.at("gamma").get<double>()};
  } else if (kind == "supercontrolled") {
    c.base = SuperControlled{base.at("alpha2").get<double>()};
  } else if (kind == "custom") {
    c.base = CustomGate{matrix4_from_json(base.at("matrix"), "base matrix")};
  } else {
    throw ParseError("circuit document: unknown base kind '" + kind + "'");
  }
  const Json& layers = j.at("layers");
  if (!layers.is_array() || layers.empty()) {
    throw ParseError("circuit document: layers must be a nonempty array");
  }
  c.layers.clear();
  for (const Json& l : layers) {
    c.layers.push_back(LocalLayer{matrix2_from_json(l.at("a"), "layer a"),
                                  matrix2_from_json(l.at("b"), "layer b")});
  }
  if (j.contains("applications") &&
      j.at("applications").get<int>() != c.applications()) {
    throw ParseError(
        "circuit document: layers count must equal applications + 1");
  }
  if (base.contains("overrides")) {
    for (const Json& ov : base.at("overrides")) {
      const int idx = ov.at("index").get<int>();
      if (idx < 0 || idx >= c.applications()) {
        throw ParseError("circuit document: override index out of range");
      }
      c.set_override(idx, matrix4_from_json(ov.at("matrix"), "override"));
    }
  }
  return c;
}

// --- Files and angles ------------------------------------------------------

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

/// Parse an angle given as a decimal or a simple fraction of pi:
/// "0.5", "pi", "-pi/4", "3pi/8", "2pi".
inline double parse_angle(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  if (s.empty()) throw ParseError("empty angle");
  double sign = 1.0;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    sign = s[0] == '-' ? -1.0 : 1.0;
    pos = 1;
  }
  const std::size_t pi_at = s.find("pi", pos);
  if (pi_at == std::string::npos) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(s.substr(pos), &used);
    } catch (const std::exception&) {
      throw ParseError("invalid angle: " + text);
    }
    if (pos + used != s.size()) throw ParseError("invalid angle: " + text);
    return sign * value;
  }
  double numerator = 1.0;
  if (pi_at > pos) {
    std::size_t used = 0;
    try {
      numerator = std::stod(s.substr(pos, pi_at - pos), &used);
    } catch (const std::exception&) {
      throw ParseError("invalid angle: " + text);
    }
    if (used != pi_at - pos) throw ParseError("invalid angle: " + text);
  }
  double denominator = 1.0;
  std::size_t rest = pi_at + 2;
  if (rest < s.size()) {
    if (s[rest] != '/') throw ParseError("invalid angle: " + text);
    std::size_t used = 0;
    try {
      denominator = std::stod(s.substr(rest + 1), &used);
    } catch (const std::exception&) {
      throw ParseError("invalid angle: " + text);
    }
    if (rest + 1 + used != s.size() || denominator == 0.0) {
      throw ParseError("invalid angle: " + text);
    }
  }
  return sign * numerator * kPi / denominator;
}

/// Parse "c1,c2,c3" with each component an angle.
inline std::array<double, 3> parse_coords(const std::string& text) {
  std::array<double, 3> out{};
  std::stringstream ss(text);
  std::string part;
  int k = 0;
  while (std::getline(ss, part, ',')) {
    if (k >= 3) throw ParseError("expected three comma-separated angles");
    out[static_cast<std::size_t>(k++)] = parse_angle(part);
  }
  if (k != 3) throw ParseError("expected three comma-separated angles");
  return out;
}

/// Parse "controlled:<angle>" or "supercontrolled:<angle>".
inline BaseGate parse_base(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw ParseError("base must be controlled:<angle> or supercontrolled:<angle>");
  }
  const std::string kind = text.substr(0, colon);
  const double value = parse_angle(text.substr(colon + 1));
  if (kind == "controlled") return Controlled{value};
  if (kind == "supercontrolled") return SuperControlled{value};
  throw ParseError("unknown base kind '" + kind + "'");
}

/// Default comparison tolerance, overridable through the WEYL_TOL
/// environment variable.
inline double env_tolerance(double fallback = kEqTol) {
  const char* env = std::getenv("WEYL_TOL");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || !(v > 0.0) || !std::isfinite(v)) return fallback;
  return v;
}

}  // namespace weyl
