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

#ifndef NOISELAB_ZP_WALK_HPP_
#define NOISELAB_ZP_WALK_HPP_

// The stationary simple random walk on Z_p truncated to m atoms.
//
// Factor 0 carries the walk position X_{m-1} (uniform on Z_p). Factor j, for
// 1 <= j <= m-1, carries the increment X_j - X_{j-1} (fair +-1). Earlier
// positions are derived:
//   X_k = X_{m-1} - (X_{m-1} - X_{m-2}) - ... - (X_{k+1} - X_k)  (mod p).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "noiselab/noise.hpp"
#include "noiselab/space.hpp"

namespace noiselab {

struct WalkSpace {
  int p = 0;
  int m = 0;
  SpacePtr space;
};

inline std::size_t walk_states(int p, int m) {
  return static_cast<std::size_t>(p) * (std::size_t{1} << (m - 1));
}

inline WalkSpace build_walk_space(int p, int m, std::size_t max_states = kDefaultMaxStates) {
  require(p % 2 != 0, "p must be odd");
  require(p >= 3, "p must be at least 3");
  require(m >= 1, "m must be at least 1");
  if (m - 1 > kMaxFactors - 1 || walk_states(p, m) > max_states) {
    fail(ErrorKind::kCapExceeded, "walk space p=" + std::to_string(p) + " m=" + std::to_string(m) +
                                      " exceeds cap of " + std::to_string(max_states) + " states");
  }
  std::vector<FactorSpace> factors;
  factors.push_back(FactorSpace::uniform(static_cast<std::size_t>(p)));
  for (int j = 1; j < m; ++j) factors.push_back(FactorSpace::sign());
  return WalkSpace{p, m, build_space(std::move(factors), max_states)};
}

namespace detail {

inline int increment_value(std::size_t outcome) { return outcome == 0 ? -1 : 1; }

inline int walk_position_at(const WalkSpace& ws, std::span<const std::size_t> c, int k) {
  long long x = static_cast<long long>(c[0]);
  for (int j = k + 1; j < ws.m; ++j) x -= increment_value(c[static_cast<std::size_t>(j)]);
  x %= ws.p;
  if (x < 0) x += ws.p;
  return static_cast<int>(x);
}

}  // namespace detail

// X_k as a real variable with values in {0, ..., p-1}.
inline RandomVariable walk_position(const WalkSpace& ws, int k) {
  require(k >= 0 && k < ws.m, "walk position index out of range");
  return RandomVariable::from_coordinates(ws.space, [&](std::span<const std::size_t> c) {
    return static_cast<double>(detail::walk_position_at(ws, c, k));
  });
}

// X_j - X_{j-1} valued in {-1, +1} as reals, 1 <= j <= m-1.
inline RandomVariable walk_increment(const WalkSpace& ws, int j) {
  require(j >= 1 && j < ws.m, "increment index out of range");
  const Complex values[] = {-1.0, 1.0};
  return RandomVariable::coordinate(ws.space, j, values);
}

// exp(2 pi i X_0 / p).
inline RandomVariable character(const WalkSpace& ws) {
  const double w = 2.0 * std::numbers::pi / ws.p;
  return RandomVariable::from_coordinates(ws.space, [&](std::span<const std::size_t> c) {
    return std::polar(1.0, w * detail::walk_position_at(ws, c, 0));
  });
}

// e^{-t} (cos^2(2 pi/p) + e^{-2t} sin^2(2 pi/p))^((m-1)/2).
inline double closed_form_norm(int p, int m, double t) {
  require(p % 2 != 0 && p >= 3, "p must be odd and at least 3");
  require(m >= 1, "m must be at least 1");
  require_time(t);
  const double a = 2.0 * std::numbers::pi / p;
  const double c = std::cos(a);
  const double s = std::sin(a);
  const double per_step = c * c + std::exp(-2.0 * t) * s * s;
  return std::exp(-t) * std::pow(per_step, 0.5 * (m - 1));
}

// (1/p) sum_r X o R^r, where R adds 1 to every position. In the stored
// coordinates R shifts X_{m-1} and leaves the increments alone.
inline RandomVariable rotation_average(const RandomVariable& x, const WalkSpace& ws) {
  require(same_space(x.space(), ws.space), "random variable is not on the walk space");
  const std::size_t stride = ws.space->stride(0);
  std::vector<Complex> out(x.size());
  for (std::size_t s = 0; s < x.size(); ++s) {
    const std::size_t x_last = s / stride;
    const std::size_t rest = s % stride;
    Complex acc = 0.0;
    for (int r = 0; r < ws.p; ++r) {
      const std::size_t shifted = (x_last + static_cast<std::size_t>(r)) % static_cast<std::size_t>(ws.p);
      acc += x[shifted * stride + rest];
    }
    out[s] = acc / static_cast<double>(ws.p);
  }
  return RandomVariable(x.space(), std::move(out));
}

// Increments-only subset {1, ..., m-1}.
inline SubsetIndex increment_factors(const WalkSpace& ws) {
  return SubsetIndex::full(ws.m) - SubsetIndex::singleton(0);
}

struct WalkH1Basis {
  // X_j - X_{j-1}, j = 1..m-1: the level-one variables that survive m -> infinity.
  std::vector<RandomVariable> increments;
  // Real mean-zero functions of X_{m-1}: cos and sin of 2 pi j X_{m-1} / p,
  // j = 1..(p-1)/2. They lie in level one only because of the truncation.
  std::vector<RandomVariable> tail_functions;
};

inline WalkH1Basis walk_h1_basis(const WalkSpace& ws) {
  WalkH1Basis b;
  for (int j = 1; j < ws.m; ++j) b.increments.push_back(walk_increment(ws, j));
  const double w = 2.0 * std::numbers::pi / ws.p;
  for (int j = 1; j <= (ws.p - 1) / 2; ++j) {
    std::vector<Complex> cos_vals(static_cast<std::size_t>(ws.p));
    std::vector<Complex> sin_vals(static_cast<std::size_t>(ws.p));
    for (int x = 0; x < ws.p; ++x) {
      cos_vals[static_cast<std::size_t>(x)] = std::cos(w * j * x);
      sin_vals[static_cast<std::size_t>(x)] = std::sin(w * j * x);
    }
    b.tail_functions.push_back(RandomVariable::coordinate(ws.space, 0, cos_vals));
    b.tail_functions.push_back(RandomVariable::coordinate(ws.space, 0, sin_vals));
  }
  return b;
}

struct DecayRow {
  int m = 0;
  double exact = 0.0;        // ||U_t chi|| on the truncated space
  double closed_form = 0.0;
  double ratio = 0.0;        // exact(m) / exact(m-1); NaN when m = 1
  double increment_norm = 0.0;  // ||U_t (X_1 - X_0)||; NaN when m = 1
};

inline double exact_character_norm(int p, int m, double t, std::size_t max_states = kDefaultMaxStates) {
  const WalkSpace ws = build_walk_space(p, m, max_states);
  return norm(noise_operator(character(ws), t));
}

inline std::vector<DecayRow> sensitivity_decay_table(int p, double t, int m_first, int m_last,
                                                     std::size_t max_states = kDefaultMaxStates) {
  require(m_first >= 1 && m_first <= m_last, "m range must satisfy 1 <= first <= last");
  require_time(t);
  if (m_last - 1 > kMaxFactors - 1 || walk_states(p, m_last) > max_states) {
    fail(ErrorKind::kCapExceeded, "walk space p=" + std::to_string(p) + " m=" + std::to_string(m_last) +
                                      " exceeds cap of " + std::to_string(max_states) + " states");
  }
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  std::vector<DecayRow> rows;
  double prev = m_first > 1 ? exact_character_norm(p, m_first - 1, t, max_states) : kNaN;
  for (int m = m_first; m <= m_last; ++m) {
    const WalkSpace ws = build_walk_space(p, m, max_states);
    DecayRow row;
    row.m = m;
    row.exact = norm(noise_operator(character(ws), t));
    row.closed_form = closed_form_norm(p, m, t);
    row.ratio = row.exact / prev;
    row.increment_norm = m > 1 ? norm(noise_operator(walk_increment(ws, 1), t)) : kNaN;
    prev = row.exact;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace noiselab

#endif  // NOISELAB_ZP_WALK_HPP_
