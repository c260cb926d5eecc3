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

#ifndef NOISELAB_TOWERS_HPP_
#define NOISELAB_TOWERS_HPP_

// Finite subalgebras generated by partitions of the factors, refinement
// towers, and the coarse-grained levels and semigroups they induce.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "noiselab/efron_stein.hpp"
#include "noiselab/noise.hpp"
#include "noiselab/space.hpp"

namespace noiselab {

// A partition of {0..m-1} into nonempty blocks, kept in canonical order
// (blocks sorted by their lowest member).
class Partition {
 public:
  Partition(int m, std::vector<SubsetIndex> blocks) : m_(m), blocks_(std::move(blocks)) {
    require(m_ >= 1 && m_ <= kMaxFactors, "partition needs 1.." + std::to_string(kMaxFactors) + " factors");
    SubsetIndex seen;
    for (auto b : blocks_) {
      require(!b.is_empty(), "partition blocks must be nonempty");
      require(b.fits(m_), "partition block 0x" + b.hex() + " exceeds " + std::to_string(m_) + " factors");
      require(!b.intersects(seen), "partition blocks overlap");
      seen = seen | b;
    }
    require(seen == SubsetIndex::full(m_), "partition blocks do not cover all factors");
    std::sort(blocks_.begin(), blocks_.end(), [](SubsetIndex a, SubsetIndex b) {
      return std::countr_zero(a.bits()) < std::countr_zero(b.bits());
    });
  }

  static Partition discrete(int m) {
    std::vector<SubsetIndex> b;
    for (int k = 0; k < m; ++k) b.push_back(SubsetIndex::singleton(k));
    return Partition(m, std::move(b));
  }
  static Partition single_block(int m) { return Partition(m, {SubsetIndex::full(m)}); }

  // Parses "0,1|2": '|' separates blocks, ',' separates factor indices.
  static Partition parse(std::string_view text, int m) {
    std::vector<SubsetIndex> blocks;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t bar = std::min(text.find('|', start), text.size());
      const std::string_view part = text.substr(start, bar - start);
      std::uint64_t bits = 0;
      std::size_t p = 0;
      while (p <= part.size()) {
        const std::size_t comma = std::min(part.find(',', p), part.size());
        std::string tok(part.substr(p, comma - p));
        tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }),
                  tok.end());
        if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
          fail(ErrorKind::kParse, "bad factor index '" + tok + "' in partition '" + std::string(text) + "'");
        }
        const int k = std::stoi(tok);
        require(k < m, "factor index " + tok + " out of range in partition");
        require(((bits >> k) & 1u) == 0, "factor " + tok + " repeated in a block");
        bits |= std::uint64_t{1} << k;
        p = comma + 1;
      }
      blocks.emplace_back(bits);
      start = bar + 1;
    }
    return Partition(m, std::move(blocks));
  }

  int num_factors() const noexcept { return m_; }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  const std::vector<SubsetIndex>& blocks() const noexcept { return blocks_; }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (i) out += '|';
      const auto mem = blocks_[i].members();
      for (std::size_t j = 0; j < mem.size(); ++j) {
        if (j) out += ',';
        out += std::to_string(mem[j]);
      }
    }
    return out;
  }

  bool operator==(const Partition& o) const { return m_ == o.m_ && blocks_ == o.blocks_; }

 private:
  int m_;
  std::vector<SubsetIndex> blocks_;
};

// True when every block of `fine` lies inside a block of `coarse`.
inline bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.num_factors() != coarse.num_factors()) return false;
  return std::all_of(fine.blocks().begin(), fine.blocks().end(), [&](SubsetIndex b) {
    return std::any_of(coarse.blocks().begin(), coarse.blocks().end(),
                       [b](SubsetIndex c) { return b.is_subset_of(c); });
  });
}

// Union of the blocks of P that meet S.
inline SubsetIndex saturation(SubsetIndex s, const Partition& p) {
  SubsetIndex out;
  for (auto b : p.blocks()) {
    if (b.intersects(s)) out = out | b;
  }
  return out;
}

// Number of blocks of P that meet S.
inline int touched(SubsetIndex s, const Partition& p) {
  int n = 0;
  for (auto b : p.blocks()) n += b.intersects(s) ? 1 : 0;
  return n;
}

// A chain of partitions, each refined by the next.
class Tower {
 public:
  explicit Tower(std::vector<Partition> stages) : stages_(std::move(stages)) {
    require(!stages_.empty(), "tower has no stages");
    for (std::size_t i = 1; i < stages_.size(); ++i) {
      require(refines(stages_[i], stages_[i - 1]),
              "tower stage " + std::to_string(i) + " does not refine stage " + std::to_string(i - 1));
    }
  }

  // Parses "0,1|2;0|1|2": ';' separates stages.
  static Tower parse(std::string_view text, int m) {
    std::vector<Partition> stages;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t semi = std::min(text.find(';', start), text.size());
      stages.push_back(Partition::parse(text.substr(start, semi - start), m));
      start = semi + 1;
    }
    return Tower(std::move(stages));
  }

  const std::vector<Partition>& stages() const noexcept { return stages_; }
  const Partition& finest() const { return stages_.back(); }

 private:
  std::vector<Partition> stages_;
};

namespace detail {

inline void require_partition_fits(const ProductSpace& space, const Partition& p) {
  require(p.num_factors() == space.num_factors(),
          "partition has " + std::to_string(p.num_factors()) + " factors, space has " +
              std::to_string(space.num_factors()));
}

// M_b = product of M_k over k in the block.
inline void apply_block_average(const ProductSpace& space, SubsetIndex block, std::span<Complex> values) {
  for (int k : block.members()) apply_factor_mix(space, k, values, 1.0, 0.0);
}

// values <- a * M_b(values) + b * values.
inline void apply_block_mix(const ProductSpace& space, SubsetIndex block, std::span<Complex> values,
                            Complex a, Complex b) {
  std::vector<Complex> avg(values.begin(), values.end());
  apply_block_average(space, block, avg);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = a * avg[i] + b * values[i];
}

}  // namespace detail

// Coarse levels: entry n collects every H_S with touched(S, P) = n.
inline std::vector<RandomVariable> coarse_level_components(const RandomVariable& x, const Partition& p) {
  const ProductSpace& space = *x.space();
  detail::require_partition_fits(space, p);
  const std::size_t nb = p.num_blocks();
  std::vector<RandomVariable> levels(nb + 1, RandomVariable::zero(x.space()));
  levels[0] = x;
  for (std::size_t i = 0; i < nb; ++i) {
    const SubsetIndex block = p.blocks()[i];
    for (std::size_t n = i + 2; n-- > 0;) {
      auto& cur = levels[n];
      detail::apply_block_average(space, block, cur.mutable_values());
      if (n > 0) {
        RandomVariable lower = levels[n - 1];
        detail::apply_block_mix(space, block, lower.mutable_values(), -1.0, 1.0);
        cur += lower;
      }
    }
  }
  return levels;
}

inline RandomVariable coarse_level_project(const RandomVariable& x, const Partition& p, int n) {
  require(n >= 0 && static_cast<std::size_t>(n) <= p.num_blocks(),
          "coarse level " + std::to_string(n) + " out of range 0.." + std::to_string(p.num_blocks()));
  return coarse_level_components(x, p)[static_cast<std::size_t>(n)];
}

// U_t^(P): the tensor product over blocks of M_b + e^{-t}(I - M_b).
inline RandomVariable coarse_noise_operator(const RandomVariable& x, const Partition& p, double t) {
  require_time(t);
  detail::require_partition_fits(*x.space(), p);
  const double keep = survival_probability(t);
  RandomVariable out = x;
  for (auto b : p.blocks()) detail::apply_block_mix(*x.space(), b, out.mutable_values(), 1.0 - keep, keep);
  return out;
}

// N^(P) X = sum_b (X - M_b X).
inline RandomVariable coarse_generator_apply(const RandomVariable& x, const Partition& p) {
  detail::require_partition_fits(*x.space(), p);
  RandomVariable out = RandomVariable::zero(x.space());
  for (auto b : p.blocks()) {
    RandomVariable term = x;
    detail::apply_block_mix(*x.space(), b, term.mutable_values(), -1.0, 1.0);
    out += term;
  }
  return out;
}

struct StageForms {
  double n_form = 0.0;  // Re <N^(P) X, X>
  double u_form = 0.0;  // Re <U_t^(P) X, X>
};

inline StageForms stage_forms(const RandomVariable& x, const Partition& p, double t) {
  return {inner(coarse_generator_apply(x, p), x).real(), inner(coarse_noise_operator(x, p, t), x).real()};
}

struct MonotoneReport {
  StageForms coarse;
  StageForms fine;
  bool u_ordered = false;  // coarse U-form >= fine U-form - tol
  bool n_ordered = false;  // coarse N-form <= fine N-form + tol
  bool holds() const noexcept { return u_ordered && n_ordered; }
};

inline MonotoneReport check_monotone(const RandomVariable& x, double t, const Partition& coarse,
                                     const Partition& fine, double tol = kDefaultOperatorTolerance) {
  require(refines(fine, coarse), "fine partition " + fine.to_string() + " does not refine " + coarse.to_string());
  MonotoneReport r;
  r.coarse = stage_forms(x, coarse, t);
  r.fine = stage_forms(x, fine, t);
  r.u_ordered = r.coarse.u_form >= r.fine.u_form - tol;
  r.n_ordered = r.coarse.n_form <= r.fine.n_form + tol;
  return r;
}

// Forms at every stage of a tower; the last entry stands in for the limit.
inline std::vector<StageForms> tower_forms(const RandomVariable& x, const Tower& tower, double t) {
  std::vector<StageForms> out;
  for (const auto& p : tower.stages()) out.push_back(stage_forms(x, p, t));
  return out;
}

// X = sum over blocks of E_block X, for every supplied partition.
inline bool h1_partition_test(const RandomVariable& x, const std::vector<Partition>& partitions,
                              double tol = kDefaultH1Tolerance) {
  for (const auto& p : partitions) {
    detail::require_partition_fits(*x.space(), p);
    RandomVariable sum = RandomVariable::zero(x.space());
    for (auto b : p.blocks()) sum += cond_expect(x, b);
    if (distance(x, sum) > tol) return false;
  }
  return true;
}

// Every set partition of {0..m-1} (Bell(m) of them), via restricted growth
// strings.
inline std::vector<Partition> enumerate_partitions(int m) {
  require(m >= 1 && m <= 12, "partition enumeration limited to 12 factors");
  std::vector<Partition> out;
  std::vector<int> label(static_cast<std::size_t>(m), 0);
  std::vector<int> max_before(static_cast<std::size_t>(m), 0);
  while (true) {
    int nblocks = 0;
    for (int v : label) nblocks = std::max(nblocks, v + 1);
    std::vector<SubsetIndex> blocks(static_cast<std::size_t>(nblocks));
    for (int k = 0; k < m; ++k) {
      auto& b = blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(k)])];
      b = b | SubsetIndex::singleton(k);
    }
    out.emplace_back(m, std::move(blocks));

    int k = m - 1;
    while (k > 0 && label[static_cast<std::size_t>(k)] > max_before[static_cast<std::size_t>(k)]) --k;
    if (k == 0) break;
    ++label[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < m; ++j) {
      label[static_cast<std::size_t>(j)] = 0;
      max_before[static_cast<std::size_t>(j)] =
          std::max(max_before[static_cast<std::size_t>(j - 1)], label[static_cast<std::size_t>(j - 1)]);
    }
  }
  return out;
}

}  // namespace noiselab

#endif  // NOISELAB_TOWERS_HPP_
