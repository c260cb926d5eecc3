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

#ifndef NOISELAB_NOISE_HPP_
#define NOISELAB_NOISE_HPP_

// Bernoulli measures on subsets of factors, the noise semigroup U_t and its
// generator, subset-averaged operators, resampling Monte Carlo and the
// sensitivity functionals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "noiselab/efron_stein.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/space.hpp"

namespace noiselab {

// Largest m for which the subset-averaging route of U_t is offered.
inline constexpr int kMaxAveragingFactors = 12;

inline void require_probability(double p) {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
}

inline void require_time(double t) {
  require(t >= 0.0 && !std::isnan(t), "t must be nonnegative");
}

// Survival probability of an atom after time t.
inline double survival_probability(double t) { return std::exp(-t); }

// mu_p(A) = p^|A| (1 - p)^(m - |A|).
inline double bernoulli_mass(SubsetIndex a, double p, int m) {
  require_probability(p);
  require(m >= 0 && m <= kMaxFactors, "m out of range");
  require(a.fits(m), "subset does not fit m factors");
  const int k = a.size();
  return std::pow(p, k) * std::pow(1.0 - p, m - k);
}

// A finitely supported probability distribution on subsets of {0..m-1}.
class SubsetMeasure {
 public:
  SubsetMeasure(int m, std::map<SubsetIndex, double> support)
      : m_(m), support_(std::move(support)) {
    require(m_ >= 0 && m_ <= kMaxFactors, "m out of range");
    double sum = 0.0;
    for (const auto& [a, w] : support_) {
      require(a.fits(m_), "subset 0x" + a.hex() + " does not fit " + std::to_string(m_) + " factors");
      require(std::isfinite(w) && w >= 0.0, "subset weights must be nonnegative");
      sum += w;
    }
    require(std::abs(sum - 1.0) <= kProbSumTolerance,
            "subset weights sum to " + std::to_string(sum));
  }

  static SubsetMeasure dirac(SubsetIndex a, int m) { return SubsetMeasure(m, {{a, 1.0}}); }

  // Full Bernoulli measure, 2^m atoms.
  static SubsetMeasure bernoulli(double p, int m) {
    require_probability(p);
    require(m <= 24, "explicit Bernoulli measure limited to 24 factors");
    std::map<SubsetIndex, double> s;
    for_each_subset(SubsetIndex::full(m), [&](SubsetIndex a) { s.emplace(a, bernoulli_mass(a, p, m)); });
    return SubsetMeasure(m, std::move(s));
  }

  int num_factors() const noexcept { return m_; }
  const std::map<SubsetIndex, double>& support() const noexcept { return support_; }

  double mass(SubsetIndex a) const {
    const auto it = support_.find(a);
    return it == support_.end() ? 0.0 : it->second;
  }

  // mu({A : A contains b}), the eigenvalue of U_mu on H_b.
  double upper_mass(SubsetIndex b) const {
    double acc = 0.0;
    for (const auto& [a, w] : support_) {
      if (b.is_subset_of(a)) acc += w;
    }
    return acc;
  }

 private:
  int m_;
  std::map<SubsetIndex, double> support_;
};

// Pushforward of mu1 x mu2 under (A, B) -> A & B.
inline SubsetMeasure intersect_distribution(const SubsetMeasure& mu1, const SubsetMeasure& mu2) {
  require(mu1.num_factors() == mu2.num_factors(), "subset measures have different m");
  std::map<SubsetIndex, double> out;
  for (const auto& [a, wa] : mu1.support()) {
    for (const auto& [b, wb] : mu2.support()) out[a & b] += wa * wb;
  }
  return SubsetMeasure(mu1.num_factors(), std::move(out));
}

// Each atom is kept independently with probability p.
inline SubsetIndex sample_bernoulli(double p, int m, const CounterRng& rng, std::uint64_t draw = 0) {
  require_probability(p);
  require(m >= 0 && m <= kMaxFactors, "m out of range");
  std::uint64_t bits = 0;
  for (int k = 0; k < m; ++k) {
    const std::uint64_t idx = draw * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(k);
    if (rng.uniform(stream::kSubset, idx) < p) bits |= std::uint64_t{1} << k;
  }
  return SubsetIndex(bits);
}

// Exclusion times of the subset process: atom k leaves the random set at an
// independent Exp(1) time. Starts from the full set at t = 0.
inline std::vector<double> subset_process_clocks(int m, const CounterRng& rng, std::uint64_t run = 0) {
  require(m >= 0 && m <= kMaxFactors, "m out of range");
  std::vector<double> clocks(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const std::uint64_t idx = run * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(k);
    clocks[static_cast<std::size_t>(k)] = -std::log1p(-rng.uniform(stream::kClocks, idx));
  }
  return clocks;
}

// State of the subset process at time t.
inline SubsetIndex simulate_subset_process(int m, double t, const CounterRng& rng, std::uint64_t run = 0) {
  require_time(t);
  const auto clocks = subset_process_clocks(m, rng, run);
  std::uint64_t bits = 0;
  for (int k = 0; k < m; ++k) {
    if (clocks[static_cast<std::size_t>(k)] >= t) bits |= std::uint64_t{1} << k;
  }
  return SubsetIndex(bits);
}

// U_t X as the tensor product of per-factor operators M_k + e^{-t}(I - M_k).
// Acts as e^{-|A| t} on every H_A.
inline RandomVariable noise_operator(const RandomVariable& x, double t) {
  require_time(t);
  const double p = survival_probability(t);
  RandomVariable out = x;
  for (int k = 0; k < x.space()->num_factors(); ++k) {
    detail::apply_factor_mix(*x.space(), k, out.mutable_values(), 1.0 - p, p);
  }
  return out;
}

// U_t X = sum_n e^{-n t} level_project(X, n).
inline RandomVariable noise_operator_spectral(const RandomVariable& x, double t) {
  require_time(t);
  const auto levels = level_components(x);
  RandomVariable out = RandomVariable::zero(x.space());
  for (std::size_t n = 0; n < levels.size(); ++n) {
    out += levels[n] * Complex(std::exp(-static_cast<double>(n) * t));
  }
  return out;
}

// U_t X = sum_A mu_p(A) E_A X with p = e^{-t}. Cost 2^m conditional
// expectations; refused above kMaxAveragingFactors.
inline RandomVariable noise_operator_averaging(const RandomVariable& x, double t) {
  require_time(t);
  const int m = x.space()->num_factors();
  if (m > kMaxAveragingFactors) {
    fail(ErrorKind::kCapExceeded, "averaging route limited to " +
                                      std::to_string(kMaxAveragingFactors) + " factors");
  }
  const double p = survival_probability(t);
  RandomVariable out = RandomVariable::zero(x.space());
  for_each_subset(SubsetIndex::full(m), [&](SubsetIndex a) {
    const double w = bernoulli_mass(a, p, m);
    if (w != 0.0) out += cond_expect(x, a) * Complex(w);
  });
  return out;
}

// N X = sum_k (X - M_k X), the number operator.
inline RandomVariable generator_apply(const RandomVariable& x) {
  RandomVariable out = RandomVariable::zero(x.space());
  for (int k = 0; k < x.space()->num_factors(); ++k) {
    RandomVariable term = x;
    detail::apply_factor_mix(*x.space(), k, term.mutable_values(), -1.0, 1.0);
    out += term;
  }
  return out;
}

// U_mu X = sum_A mu(A) E_A X.
inline RandomVariable generalized_noise(const RandomVariable& x, const SubsetMeasure& mu) {
  require(mu.num_factors() == x.space()->num_factors(),
          "subset measure has " + std::to_string(mu.num_factors()) + " factors, space has " +
              std::to_string(x.space()->num_factors()));
  RandomVariable out = RandomVariable::zero(x.space());
  for (const auto& [a, w] : mu.support()) {
    if (w != 0.0) out += cond_expect(x, a) * Complex(w);
  }
  return out;
}

// max_k mu({A : k in A}).
inline double mu_sup_p(const SubsetMeasure& mu) {
  require(mu.num_factors() >= 1, "mu_sup_p needs at least one factor");
  double best = 0.0;
  for (int k = 0; k < mu.num_factors(); ++k) best = std::max(best, mu.upper_mass(SubsetIndex::singleton(k)));
  return best;
}

// Re <(1 - U_t) X, X>, evaluated from the level weights.
inline double noise_form(const RandomVariable& x, double t) {
  require_time(t);
  const auto w = level_weights(x);
  double acc = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) acc += -std::expm1(-static_cast<double>(n) * t) * w[n];
  return acc;
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Samples per independently computed chunk. Chunks are merged in index order,
// so the result does not depend on the thread count.
inline constexpr std::size_t kMcChunk = 4096;

namespace detail {

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    count += 1.0;
    const double d = v - mean;
    mean += d / count;
    m2 += d * (v - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double n = count + o.count;
    const double d = o.mean - mean;
    mean += d * (o.count / n);
    m2 += o.m2 + d * d * (count * o.count / n);
    count = n;
  }
};

inline std::size_t draw_outcome(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto i = static_cast<std::size_t>(it - cdf.begin());
  return std::min(i, cdf.size() - 1);
}

}  // namespace detail

// Estimates <(1 - U_t) X, X> as half the mean of |X(Y) - X(Y')|^2, where Y'
// keeps each coordinate of Y with probability e^{-t} and otherwise takes it
// from an independent copy Z.
inline McEstimate mc_noise_form(const RandomVariable& x, double t, std::size_t n_samples,
                                std::uint64_t seed, unsigned threads = 1) {
  require_time(t);
  require(n_samples >= 1, "n_samples must be at least 1");
  const ProductSpace& space = *x.space();
  const int m = space.num_factors();
  const double p = survival_probability(t);
  const CounterRng rng(seed);

  std::vector<std::vector<double>> cdfs(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const auto& w = space.factor(k).weights();
    auto& c = cdfs[static_cast<std::size_t>(k)];
    double acc = 0.0;
    for (double q : w) c.push_back(acc += q);
  }

  const std::size_t n_chunks = (n_samples + kMcChunk - 1) / kMcChunk;
  std::vector<detail::Moments> chunks(n_chunks);
  auto run_chunk = [&](std::size_t c) {
    detail::Moments mom;
    const std::size_t begin = c * kMcChunk;
    const std::size_t end = std::min(n_samples, begin + kMcChunk);
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t y = 0;
      std::size_t y_prime = 0;
      for (int k = 0; k < m; ++k) {
        const std::uint64_t idx = i * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(k);
        const auto& cdf = cdfs[static_cast<std::size_t>(k)];
        const std::size_t yk = detail::draw_outcome(cdf, rng.uniform(stream::kY, idx));
        const std::size_t zk = detail::draw_outcome(cdf, rng.uniform(stream::kZ, idx));
        const bool keep = rng.uniform(stream::kA, idx) < p;
        y += yk * space.stride(k);
        y_prime += (keep ? yk : zk) * space.stride(k);
      }
      mom.add(0.5 * std::norm(x[y] - x[y_prime]));
    }
    chunks[c] = mom;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_chunks)));
  if (workers == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < n_chunks; c += workers) run_chunk(c);
      });
    }
  }

  detail::Moments total;
  for (const auto& c : chunks) total.merge(c);
  McEstimate r;
  r.samples = n_samples;
  r.estimate = total.mean;
  r.std_error = n_samples > 1 ? std::sqrt(total.m2 / (total.count - 1.0) / total.count)
                              : std::numeric_limits<double>::quiet_NaN();
  return r;
}

// The three sensitivity functionals on a time grid.
struct NoiseCurve {
  std::vector<double> t;
  std::vector<double> dist;       // ||X - U_t X||
  std::vector<double> norm_drop;  // ||X|| - ||U_t X||
  std::vector<double> quad_form;  // <(1 - U_t) X, X>
};

inline void require_increasing_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_time(grid[i]);
    if (i > 0) require(grid[i] > grid[i - 1], "t grid must be strictly increasing");
  }
}

inline NoiseCurve sensitivity_curves(const RandomVariable& x, const std::vector<double>& t_grid) {
  require_increasing_grid(t_grid);
  const auto w = level_weights(x);
  double total = 0.0;
  for (double v : w) total += v;
  const double x_norm = std::sqrt(total);

  NoiseCurve c;
  for (double t : t_grid) {
    double dist2 = 0.0;
    double kept2 = 0.0;
    double quad = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      const double lost = -std::expm1(-static_cast<double>(n) * t);
      const double kept = std::exp(-static_cast<double>(n) * t);
      dist2 += lost * lost * w[n];
      kept2 += kept * kept * w[n];
      quad += lost * w[n];
    }
    c.t.push_back(t);
    c.dist.push_back(std::sqrt(dist2));
    c.norm_drop.push_back(x_norm - std::sqrt(kept2));
    c.quad_form.push_back(quad);
  }
  return c;
}

}  // namespace noiselab

#endif  // NOISELAB_NOISE_HPP_
