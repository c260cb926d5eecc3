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

#ifndef NOISELAB_EFRON_STEIN_HPP_
#define NOISELAB_EFRON_STEIN_HPP_

// Conditional expectations E_A, the orthogonal splitting L2 = sum_A H_A,
// the levels H_n and pair Wick products.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "noiselab/space.hpp"

namespace noiselab {

inline constexpr double kDefaultH1Tolerance = 1e-8;

// E[X | F_A]: averages out every factor not in A, in increasing factor order.
inline RandomVariable cond_expect(const RandomVariable& x, SubsetIndex a) {
  const ProductSpace& space = *x.space();
  require_subset(space, a);
  RandomVariable out = x;
  for (int k = 0; k < space.num_factors(); ++k) {
    if (!a.contains(k)) detail::apply_factor_mix(space, k, out.mutable_values(), 1.0, 0.0);
  }
  return out;
}

// Orthogonal projection onto H_A: (I - M_k) for k in A, M_k for k outside A.
inline RandomVariable project_HA(const RandomVariable& x, SubsetIndex a) {
  const ProductSpace& space = *x.space();
  require_subset(space, a);
  RandomVariable out = x;
  for (int k = 0; k < space.num_factors(); ++k) {
    if (a.contains(k)) {
      detail::apply_factor_mix(space, k, out.mutable_values(), -1.0, 1.0);
    } else {
      detail::apply_factor_mix(space, k, out.mutable_values(), 1.0, 0.0);
    }
  }
  return out;
}

// The components X_A of X, indexed densely by the bitmask of A.
class Decomposition {
 public:
  Decomposition(SpacePtr space, std::vector<RandomVariable> components)
      : space_(std::move(space)), components_(std::move(components)) {
    require(components_.size() == (std::size_t{1} << space_->num_factors()),
            "decomposition needs one component per subset");
  }

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t num_components() const noexcept { return components_.size(); }
  const RandomVariable& operator[](SubsetIndex a) const { return components_.at(a.bits()); }
  const std::vector<RandomVariable>& components() const noexcept { return components_; }

  RandomVariable reconstruct() const {
    RandomVariable sum = RandomVariable::zero(space_);
    for (const auto& c : components_) sum += c;
    return sum;
  }

  // sum_{B subset of A} X_B, which equals E_A X.
  RandomVariable partial_sum(SubsetIndex a) const {
    RandomVariable sum = RandomVariable::zero(space_);
    for_each_subset(a, [&](SubsetIndex b) { sum += (*this)[b]; });
    return sum;
  }

 private:
  SpacePtr space_;
  std::vector<RandomVariable> components_;
};

// Upper bound on 2^m * total_states for a full decomposition.
inline constexpr std::size_t kMaxDecompositionCells = std::size_t{1} << 26;

inline Decomposition decompose(const RandomVariable& x) {
  const ProductSpace& space = *x.space();
  const int m = space.num_factors();
  if (m > 26 || (std::size_t{1} << m) > kMaxDecompositionCells / space.total_states()) {
    fail(ErrorKind::kCapExceeded, "decomposition of " + std::to_string(m) + " factors over " +
                                      std::to_string(space.total_states()) +
                                      " states exceeds the dense cap");
  }
  std::vector<RandomVariable> comps;
  comps.reserve(std::size_t{1} << m);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    comps.push_back(project_HA(x, SubsetIndex(bits)));
  }
  return Decomposition(x.space(), std::move(comps));
}

// All level projections (level n = sum of X_A over |A| = n), n = 0..m.
// Built factor by factor: after processing factor k, entry n holds the part
// of X whose factors among 0..k number exactly n in its support.
inline std::vector<RandomVariable> level_components(const RandomVariable& x) {
  const ProductSpace& space = *x.space();
  const int m = space.num_factors();
  std::vector<RandomVariable> levels(static_cast<std::size_t>(m) + 1, RandomVariable::zero(x.space()));
  levels[0] = x;
  for (int k = 0; k < m; ++k) {
    for (int n = k + 1; n >= 0; --n) {
      auto& cur = levels[static_cast<std::size_t>(n)];
      detail::apply_factor_mix(space, k, cur.mutable_values(), 1.0, 0.0);
      if (n > 0) {
        RandomVariable lower = levels[static_cast<std::size_t>(n - 1)];
        detail::apply_factor_mix(space, k, lower.mutable_values(), -1.0, 1.0);
        cur += lower;
      }
    }
  }
  return levels;
}

inline void require_level(const ProductSpace& space, int n) {
  require(n >= 0 && n <= space.num_factors(),
          "level " + std::to_string(n) + " out of range 0.." + std::to_string(space.num_factors()));
}

inline RandomVariable level_project(const RandomVariable& x, int n) {
  require_level(*x.space(), n);
  return level_components(x)[static_cast<std::size_t>(n)];
}

// (||level_project(X, n)||^2)_{n=0..m}.
inline std::vector<double> level_weights(const RandomVariable& x) {
  const auto levels = level_components(x);
  std::vector<double> w;
  w.reserve(levels.size());
  for (const auto& l : levels) w.push_back(norm_squared(l));
  return w;
}

// Outcome of the level-one membership test.
struct H1Check {
  bool in_h1 = false;
  // ||X - level_project(X, 1)||.
  double spectral_defect = 0.0;
  // ||X - sum_k E_{k} X|| for the partition into singletons.
  double partition_defect = 0.0;
  // Present when in_h1 is false: the singleton blocks of the failing partition.
  std::optional<std::vector<SubsetIndex>> failing_partition;
};

inline RandomVariable sum_of_singleton_expectations(const RandomVariable& x) {
  RandomVariable sum = RandomVariable::zero(x.space());
  for (int k = 0; k < x.space()->num_factors(); ++k) sum += cond_expect(x, SubsetIndex::singleton(k));
  return sum;
}

inline H1Check is_in_H1(const RandomVariable& x, double tol = kDefaultH1Tolerance) {
  H1Check r;
  r.spectral_defect = distance(x, level_project(x, 1));
  r.partition_defect = distance(x, sum_of_singleton_expectations(x));
  r.in_h1 = r.spectral_defect <= tol;
  if (!r.in_h1) {
    std::vector<SubsetIndex> blocks;
    for (int k = 0; k < x.space()->num_factors(); ++k) blocks.push_back(SubsetIndex::singleton(k));
    r.failing_partition = std::move(blocks);
  }
  return r;
}

// :XY: = sum over ordered pairs of distinct factors a != b of (E_a X)(E_b Y).
// Both inputs must lie in H_1 within tol.
inline RandomVariable wick_product(const RandomVariable& x, const RandomVariable& y,
                                   double tol = kDefaultH1Tolerance) {
  require_same_space(x, y);
  const auto cx = is_in_H1(x, tol);
  const auto cy = is_in_H1(y, tol);
  if (!cx.in_h1 || !cy.in_h1) {
    fail(ErrorKind::kValidation, "wick_product inputs must lie in H1 (defects " +
                                     std::to_string(cx.spectral_defect) + ", " +
                                     std::to_string(cy.spectral_defect) + ")");
  }
  const int m = x.space()->num_factors();
  RandomVariable sum_x = RandomVariable::zero(x.space());
  RandomVariable sum_y = RandomVariable::zero(x.space());
  RandomVariable diagonal = RandomVariable::zero(x.space());
  for (int k = 0; k < m; ++k) {
    const auto a = SubsetIndex::singleton(k);
    RandomVariable ex = cond_expect(x, a);
    RandomVariable ey = cond_expect(y, a);
    sum_x += ex;
    sum_y += ey;
    diagonal += ex * ey;
  }
  return sum_x * sum_y - diagonal;
}

}  // namespace noiselab

#endif  // NOISELAB_EFRON_STEIN_HPP_
