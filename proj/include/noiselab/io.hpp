// Copyright 2026 The noise-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOISELAB_IO_HPP_
#define NOISELAB_IO_HPP_

// JSON schemas for spaces, random variables and decompositions, plus the
// CSV and file helpers used by the command-line tool.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "noiselab/efron_stein.hpp"
#include "noiselab/space.hpp"

namespace noiselab::io {

using nlohmann::json;

inline constexpr std::string_view kToolVersion = "noise-lab 0.1.0";

// %.17g, which round-trips every finite double; "nan"/"inf" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::kParse, std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kParse, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kParse, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::kParse, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) { fail(ErrorKind::kParse, what); }

inline std::string label_of(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

inline Complex complex_of(const json& v, std::size_t i) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  schema_error("values[" + std::to_string(i) + "] must be a number or [re, im]");
}

inline json complex_array(std::span<const Complex> values) {
  json arr = json::array();
  for (const auto& z : values) arr.push_back(json::array({z.real(), z.imag()}));
  return arr;
}

}  // namespace detail

// {"factors":[{"outcomes":[...],"probs":[...]}, ...]}
inline SpacePtr space_from_json(const json& j, std::size_t max_states = kDefaultMaxStates) {
  if (!j.is_object() || !j.contains("factors") || !j["factors"].is_array()) {
    detail::schema_error("space must be an object with a \"factors\" array");
  }
  std::vector<FactorSpace> factors;
  const auto& arr = j["factors"];
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& f = arr[k];
    const std::string where = "factor " + std::to_string(k);
    if (!f.is_object() || !f.contains("probs") || !f["probs"].is_array()) {
      detail::schema_error(where + ": needs a \"probs\" array");
    }
    std::vector<double> probs;
    for (const auto& q : f["probs"]) {
      if (!q.is_number()) detail::schema_error(where + ": probs must be numbers");
      probs.push_back(q.get<double>());
    }
    std::vector<std::string> labels;
    if (f.contains("outcomes")) {
      if (!f["outcomes"].is_array()) detail::schema_error(where + ": outcomes must be an array");
      for (const auto& o : f["outcomes"]) labels.push_back(detail::label_of(o));
    } else {
      for (std::size_t i = 0; i < probs.size(); ++i) labels.push_back(std::to_string(i));
    }
    try {
      factors.emplace_back(std::move(labels), std::move(probs));
    } catch (const Error& e) {
      fail(e.kind(), where + ": " + e.what());
    }
  }
  return build_space(std::move(factors), max_states);
}

inline json space_to_json(const ProductSpace& space) {
  json arr = json::array();
  for (const auto& f : space.factors()) arr.push_back({{"outcomes", f.outcomes()}, {"probs", f.probs()}});
  return {{"factors", arr}};
}

// {"space_hash": "<hex>", "values": [[re, im], ...]}
inline RandomVariable rv_from_json(const json& j, const SpacePtr& space) {
  if (!j.is_object() || !j.contains("values") || !j["values"].is_array()) {
    detail::schema_error("random variable must be an object with a \"values\" array");
  }
  if (j.contains("space_hash")) {
    if (!j["space_hash"].is_string()) detail::schema_error("space_hash must be a string");
    const auto h = j["space_hash"].get<std::string>();
    require(h == space->hash_hex(), "space_hash " + h + " does not match space " + space->hash_hex());
  }
  const auto& arr = j["values"];
  std::vector<Complex> values;
  values.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) values.push_back(detail::complex_of(arr[i], i));
  return RandomVariable(space, std::move(values));
}

inline json rv_to_json(const RandomVariable& x) {
  return {{"space_hash", x.space()->hash_hex()}, {"values", detail::complex_array(x.values())}};
}

// Metadata recorded at the top of every output file.
struct OutputMeta {
  std::string space_hash;
  std::uint64_t seed = 0;
  bool has_seed = false;
  double tol = 0.0;
};

inline std::string csv_header(const OutputMeta& meta) {
  std::string out = "# tool: " + std::string(kToolVersion) + "\n";
  if (!meta.space_hash.empty()) out += "# space_hash: " + meta.space_hash + "\n";
  out += "# seed: " + (meta.has_seed ? std::to_string(meta.seed) : std::string("none")) + "\n";
  out += "# tol: " + format_double(meta.tol) + "\n";
  return out;
}

inline json meta_json(const OutputMeta& meta) {
  json j = {{"tool", kToolVersion}, {"tol", meta.tol}};
  if (!meta.space_hash.empty()) j["space_hash"] = meta.space_hash;
  j["seed"] = meta.has_seed ? json(meta.seed) : json(nullptr);
  return j;
}

// {"components": {"<bitmask-hex>": [[re, im], ...]}}; components whose norm is
// at most drop_below are omitted.
inline json decomposition_to_json(const Decomposition& d, double drop_below, const OutputMeta& meta) {
  json comps = json::object();
  for (std::size_t bits = 0; bits < d.num_components(); ++bits) {
    const auto& c = d.components()[bits];
    if (norm(c) <= drop_below) continue;
    comps[SubsetIndex(bits).hex()] = detail::complex_array(c.values());
  }
  return {{"meta", meta_json(meta)}, {"components", comps}};
}

// "a:step:b" (inclusive of b up to rounding), "t1,t2,...", or a single value.
inline std::vector<double> parse_t_grid(std::string_view grid_text) {
  auto to_double = [&](std::string_view s) {
    std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      fail(ErrorKind::kParse, "bad number '" + str + "' in t grid");
    }
    if (used != str.size()) fail(ErrorKind::kParse, "bad number '" + str + "' in t grid");
    return v;
  };
  std::vector<double> grid;
  const auto c1 = grid_text.find(':');
  if (c1 != std::string_view::npos) {
    const auto c2 = grid_text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) fail(ErrorKind::kParse, "t range must be start:step:stop");
    const double start = to_double(grid_text.substr(0, c1));
    const double step = to_double(grid_text.substr(c1 + 1, c2 - c1 - 1));
    const double stop = to_double(grid_text.substr(c2 + 1));
    require(step > 0.0, "t step must be positive");
    require(stop >= start, "t range stop must not precede start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
  } else {
    std::size_t start = 0;
    while (start <= grid_text.size()) {
      const std::size_t comma = std::min(grid_text.find(',', start), grid_text.size());
      grid.push_back(to_double(grid_text.substr(start, comma - start)));
      start = comma + 1;
    }
  }
  return grid;
}

}  // namespace noiselab::io

#endif  // NOISELAB_IO_HPP_
