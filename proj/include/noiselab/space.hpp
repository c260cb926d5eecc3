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

#ifndef NOISELAB_SPACE_HPP_
#define NOISELAB_SPACE_HPP_

// Finite product probability spaces, subsets of factors and complex-valued
// random variables on them.
//
// States are enumerated row-major with factor 0 varying slowest, so the
// state index of a coordinate tuple (c_0, ..., c_{m-1}) is
// sum_k c_k * stride_k with stride_{m-1} = 1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noiselab/error.hpp"

namespace noiselab {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultMaxStates = std::size_t{1} << 24;
inline constexpr int kMaxFactors = 63;
inline constexpr double kProbSumTolerance = 1e-12;

// Relative tolerance used by operator-identity checks.
inline constexpr double kDefaultOperatorTolerance = 1e-10;

class FactorSpace {
 public:
  FactorSpace(std::vector<std::string> outcomes, std::vector<double> probs)
      : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
    require(!probs_.empty(), "factor has no outcomes");
    require(outcomes_.size() == probs_.size(),
            "outcomes and probs have different lengths (" +
                std::to_string(outcomes_.size()) + " vs " +
                std::to_string(probs_.size()) + ")");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      const double q = probs_[i];
      require(std::isfinite(q) && q > 0.0,
              "probability of outcome " + std::to_string(i) +
                  " must be strictly positive");
      sum += q;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", sum);
      fail(ErrorKind::kValidation, std::string("probabilities sum to ") + buf);
    }
    weights_.resize(probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) weights_[i] = probs_[i] / sum;
  }

  // Uniform distribution on {0, ..., n-1}, labelled by decimal strings.
  static FactorSpace uniform(std::size_t n) {
    require(n >= 1, "uniform factor needs at least one outcome");
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return FactorSpace(std::move(labels), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  // Two-point factor with outcomes "-1" (index 0) and "1" (index 1).
  static FactorSpace sign(double prob_plus = 0.5) {
    return FactorSpace({"-1", "1"}, {1.0 - prob_plus, prob_plus});
  }

  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }
  // Probabilities exactly as supplied.
  const std::vector<double>& probs() const noexcept { return probs_; }
  // Probabilities rescaled to sum to one; used by every averaging operation.
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool operator==(const FactorSpace& o) const {
    return outcomes_ == o.outcomes_ && probs_ == o.probs_;
  }

 private:
  std::vector<std::string> outcomes_;
  std::vector<double> probs_;
  std::vector<double> weights_;
};

// A set A of factor indices, stored as a bitmask.
class SubsetIndex {
 public:
  constexpr SubsetIndex() = default;
  constexpr explicit SubsetIndex(std::uint64_t bits) : bits_(bits) {}

  static constexpr SubsetIndex empty() { return SubsetIndex{}; }
  static constexpr SubsetIndex full(int m) {
    return SubsetIndex(m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1);
  }
  static constexpr SubsetIndex singleton(int k) { return SubsetIndex(std::uint64_t{1} << k); }
  static constexpr SubsetIndex of(std::initializer_list<int> ks) {
    std::uint64_t b = 0;
    for (int k : ks) b |= std::uint64_t{1} << k;
    return SubsetIndex(b);
  }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr bool contains(int k) const noexcept { return (bits_ >> k) & 1u; }
  constexpr int size() const noexcept { return std::popcount(bits_); }
  constexpr bool is_empty() const noexcept { return bits_ == 0; }
  constexpr bool is_subset_of(SubsetIndex o) const noexcept { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(SubsetIndex o) const noexcept { return (bits_ & o.bits_) != 0; }
  constexpr bool fits(int m) const noexcept { return is_subset_of(full(m)); }

  constexpr SubsetIndex complement(int m) const noexcept {
    return SubsetIndex(~bits_ & full(m).bits_);
  }
  constexpr SubsetIndex operator|(SubsetIndex o) const noexcept { return SubsetIndex(bits_ | o.bits_); }
  constexpr SubsetIndex operator&(SubsetIndex o) const noexcept { return SubsetIndex(bits_ & o.bits_); }
  constexpr SubsetIndex operator-(SubsetIndex o) const noexcept { return SubsetIndex(bits_ & ~o.bits_); }

  constexpr auto operator<=>(const SubsetIndex&) const = default;

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  // Lowercase hex without prefix, e.g. "0", "5", "1f".
  std::string hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(bits_));
    return buf;
  }

 private:
  std::uint64_t bits_ = 0;
};

// Calls fn(A) for every A contained in `within`, in increasing bit order.
template <class Fn>
void for_each_subset(SubsetIndex within, Fn&& fn) {
  const std::uint64_t w = within.bits();
  std::uint64_t s = 0;
  while (true) {
    fn(SubsetIndex(s));
    if (s == w) break;
    s = (s - w) & w;
  }
}

class ProductSpace;
using SpacePtr = std::shared_ptr<const ProductSpace>;

class ProductSpace {
 public:
  const std::vector<FactorSpace>& factors() const noexcept { return factors_; }
  int num_factors() const noexcept { return static_cast<int>(factors_.size()); }
  const FactorSpace& factor(int k) const { return factors_.at(static_cast<std::size_t>(k)); }
  std::size_t factor_size(int k) const { return factor(k).size(); }
  std::size_t stride(int k) const { return strides_.at(static_cast<std::size_t>(k)); }
  std::size_t total_states() const noexcept { return total_; }
  SubsetIndex full_set() const noexcept { return SubsetIndex::full(num_factors()); }

  // P(state), the product of factor weights.
  double probability(std::size_t state) const { return state_probs_[state]; }
  std::span<const double> state_probabilities() const noexcept { return state_probs_; }

  std::size_t coordinate(std::size_t state, int k) const {
    return (state / stride(k)) % factor_size(k);
  }
  std::vector<std::size_t> coordinates(std::size_t state) const {
    std::vector<std::size_t> c(factors_.size());
    for (int k = 0; k < num_factors(); ++k) c[static_cast<std::size_t>(k)] = coordinate(state, k);
    return c;
  }
  std::size_t state_of(std::span<const std::size_t> coords) const {
    require(coords.size() == factors_.size(), "coordinate tuple has wrong length");
    std::size_t s = 0;
    for (int k = 0; k < num_factors(); ++k) {
      const std::size_t c = coords[static_cast<std::size_t>(k)];
      require(c < factor_size(k), "coordinate out of range");
      s += c * stride(k);
    }
    return s;
  }

  // Stable content hash (FNV-1a over labels and the exact bit patterns of the
  // supplied probabilities).
  std::uint64_t hash() const noexcept { return hash_; }
  std::string hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

  bool operator==(const ProductSpace& o) const { return factors_ == o.factors_; }

 private:
  friend SpacePtr build_space(std::vector<FactorSpace> factors, std::size_t max_states);

  explicit ProductSpace(std::vector<FactorSpace> factors) : factors_(std::move(factors)) {}

  std::vector<FactorSpace> factors_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
  std::vector<double> state_probs_;
  std::uint64_t hash_ = 0;
};

namespace detail {

inline void fnv1a(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

inline void fnv1a_u64(std::uint64_t& h, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  fnv1a(h, bytes, 8);
}

}  // namespace detail

// Validates the factors and fixes the state enumeration. Throws
// ErrorKind::kCapExceeded when the product exceeds max_states.
inline SpacePtr build_space(std::vector<FactorSpace> factors,
                            std::size_t max_states = kDefaultMaxStates) {
  require(!factors.empty(), "space has no factors");
  require(factors.size() <= static_cast<std::size_t>(kMaxFactors),
          "at most " + std::to_string(kMaxFactors) + " factors are supported");
  std::size_t total = 1;
  for (const auto& f : factors) {
    if (total > max_states / f.size()) {
      fail(ErrorKind::kCapExceeded, "state count exceeds cap of " + std::to_string(max_states));
    }
    total *= f.size();
  }
  if (total > max_states) {
    fail(ErrorKind::kCapExceeded, "state count exceeds cap of " + std::to_string(max_states));
  }

  std::shared_ptr<ProductSpace> space(new ProductSpace(std::move(factors)));
  const int m = space->num_factors();
  space->total_ = total;
  space->strides_.assign(static_cast<std::size_t>(m), 1);
  for (int k = m - 2; k >= 0; --k) {
    space->strides_[static_cast<std::size_t>(k)] =
        space->strides_[static_cast<std::size_t>(k + 1)] * space->factor_size(k + 1);
  }

  space->state_probs_.assign(total, 1.0);
  for (std::size_t s = 0; s < total; ++s) {
    double q = 1.0;
    for (int k = 0; k < m; ++k) q *= space->factor(k).weights()[space->coordinate(s, k)];
    space->state_probs_[s] = q;
  }

  std::uint64_t h = 0xcbf29ce484222325ULL;
  detail::fnv1a_u64(h, static_cast<std::uint64_t>(m));
  for (const auto& f : space->factors_) {
    detail::fnv1a_u64(h, f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::string& label = f.outcomes()[i];
      detail::fnv1a_u64(h, label.size());
      detail::fnv1a(h, label.data(), label.size());
      detail::fnv1a_u64(h, std::bit_cast<std::uint64_t>(f.probs()[i]));
    }
  }
  space->hash_ = h;
  return space;
}

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && a->hash() == b->hash() && *a == *b);
}

// An element of L2 over a ProductSpace, stored densely in state order.
class RandomVariable {
 public:
  RandomVariable(SpacePtr space, std::vector<Complex> values)
      : space_(std::move(space)), values_(std::move(values)) {
    require(space_ != nullptr, "random variable has no space");
    require(values_.size() == space_->total_states(),
            "value count " + std::to_string(values_.size()) + " does not match " +
                std::to_string(space_->total_states()) + " states");
  }

  static RandomVariable constant(SpacePtr space, Complex c) {
    const std::size_t n = space->total_states();
    return RandomVariable(std::move(space), std::vector<Complex>(n, c));
  }
  static RandomVariable zero(SpacePtr space) { return constant(std::move(space), 0.0); }

  // X(state) = f(coordinates of state).
  template <class Fn>
  static RandomVariable from_coordinates(SpacePtr space, Fn&& f) {
    std::vector<Complex> v(space->total_states());
    std::vector<std::size_t> c(static_cast<std::size_t>(space->num_factors()), 0);
    for (std::size_t s = 0; s < v.size(); ++s) {
      v[s] = Complex(f(std::span<const std::size_t>(c)));
      // Odometer increment, last factor fastest.
      for (int k = space->num_factors() - 1; k >= 0; --k) {
        auto& ck = c[static_cast<std::size_t>(k)];
        if (++ck < space->factor_size(k)) break;
        ck = 0;
      }
    }
    return RandomVariable(std::move(space), std::move(v));
  }

  // X = value_of_outcome[c_k], a function of coordinate k alone.
  static RandomVariable coordinate(SpacePtr space, int k, std::span<const Complex> value_of_outcome) {
    require(k >= 0 && k < space->num_factors(), "factor index out of range");
    require(value_of_outcome.size() == space->factor_size(k), "one value per outcome required");
    std::vector<Complex> v(space->total_states());
    for (std::size_t s = 0; s < v.size(); ++s) v[s] = value_of_outcome[space->coordinate(s, k)];
    return RandomVariable(std::move(space), std::move(v));
  }

  const SpacePtr& space() const noexcept { return space_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> mutable_values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  Complex& operator[](std::size_t i) { return values_[i]; }

  bool is_real(double tol = 0.0) const {
    return std::all_of(values_.begin(), values_.end(),
                       [tol](const Complex& z) { return std::abs(z.imag()) <= tol; });
  }

  // True when X does not vary along any coordinate outside A.
  bool is_measurable(SubsetIndex a, double tol = 0.0) const {
    for (int k = 0; k < space_->num_factors(); ++k) {
      if (a.contains(k)) continue;
      const std::size_t st = space_->stride(k);
      for (std::size_t s = 0; s < values_.size(); ++s) {
        if (space_->coordinate(s, k) == 0) continue;
        const std::size_t base = s - space_->coordinate(s, k) * st;
        if (std::abs(values_[s] - values_[base]) > tol) return false;
      }
    }
    return true;
  }

  RandomVariable& operator+=(const RandomVariable& o) { return zip_assign(o, std::plus<>{}); }
  RandomVariable& operator-=(const RandomVariable& o) { return zip_assign(o, std::minus<>{}); }
  RandomVariable& operator*=(const RandomVariable& o) { return zip_assign(o, std::multiplies<>{}); }
  RandomVariable& operator*=(Complex c) {
    for (auto& v : values_) v *= c;
    return *this;
  }
  // Adds the constant c.
  RandomVariable& operator+=(Complex c) {
    for (auto& v : values_) v += c;
    return *this;
  }

  friend RandomVariable operator+(RandomVariable a, const RandomVariable& b) { return a += b; }
  friend RandomVariable operator-(RandomVariable a, const RandomVariable& b) { return a -= b; }
  friend RandomVariable operator*(RandomVariable a, const RandomVariable& b) { return a *= b; }
  friend RandomVariable operator*(RandomVariable a, Complex c) { return a *= c; }
  friend RandomVariable operator*(Complex c, RandomVariable a) { return a *= c; }
  friend RandomVariable operator+(RandomVariable a, Complex c) { return a += c; }
  friend RandomVariable operator+(Complex c, RandomVariable a) { return a += c; }
  friend RandomVariable operator-(RandomVariable a) { return a *= -1.0; }

 private:
  template <class Op>
  RandomVariable& zip_assign(const RandomVariable& o, Op op) {
    require(same_space(space_, o.space_), "random variables live on different spaces");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = op(values_[i], o.values_[i]);
    return *this;
  }

  SpacePtr space_;
  std::vector<Complex> values_;
};

inline void require_same_space(const RandomVariable& x, const RandomVariable& y) {
  require(same_space(x.space(), y.space()), "random variables live on different spaces");
}

inline Complex expectation(const RandomVariable& x) {
  const auto probs = x.space()->state_probabilities();
  Complex acc = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) acc += probs[s] * x[s];
  return acc;
}

// E[X conj(Y)].
inline Complex inner(const RandomVariable& x, const RandomVariable& y) {
  require_same_space(x, y);
  const auto probs = x.space()->state_probabilities();
  Complex acc = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) acc += probs[s] * x[s] * std::conj(y[s]);
  return acc;
}

inline double norm_squared(const RandomVariable& x) {
  const auto probs = x.space()->state_probabilities();
  double acc = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) acc += probs[s] * std::norm(x[s]);
  return acc;
}

inline double norm(const RandomVariable& x) { return std::sqrt(norm_squared(x)); }

inline double distance(const RandomVariable& x, const RandomVariable& y) {
  require_same_space(x, y);
  const auto probs = x.space()->state_probabilities();
  double acc = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) acc += probs[s] * std::norm(x[s] - y[s]);
  return std::sqrt(acc);
}

// True when ||x - y|| <= rel_tol * max(1, ||x||, ||y||).
inline bool approx_equal(const RandomVariable& x, const RandomVariable& y,
                         double rel_tol = kDefaultOperatorTolerance) {
  const double scale = std::max({1.0, norm(x), norm(y)});
  return distance(x, y) <= rel_tol * scale;
}

namespace detail {

// Visits every fiber along factor k: fn(base, stride, n) where the fiber's
// states are base + i*stride for i < n.
template <class Fn>
void for_each_fiber(const ProductSpace& space, int k, Fn&& fn) {
  const std::size_t n = space.factor_size(k);
  const std::size_t stride = space.stride(k);
  const std::size_t block = n * stride;
  for (std::size_t outer = 0; outer < space.total_states(); outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) fn(outer + inner, stride, n);
  }
}

// In place: values <- a * M_k(values) + b * values, where M_k averages over
// factor k. Covers M_k (a=1,b=0), I - M_k (a=-1,b=1) and noise mixtures.
inline void apply_factor_mix(const ProductSpace& space, int k, std::span<Complex> values,
                             Complex a, Complex b) {
  const auto& w = space.factor(k).weights();
  for_each_fiber(space, k, [&](std::size_t base, std::size_t stride, std::size_t n) {
    Complex mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += w[i] * values[base + i * stride];
    const Complex shift = a * mean;
    for (std::size_t i = 0; i < n; ++i) {
      Complex& v = values[base + i * stride];
      v = shift + b * v;
    }
  });
}

}  // namespace detail

inline void require_factor(const ProductSpace& space, int k) {
  require(k >= 0 && k < space.num_factors(),
          "factor index " + std::to_string(k) + " out of range for " +
              std::to_string(space.num_factors()) + " factors");
}

inline void require_subset(const ProductSpace& space, SubsetIndex a) {
  require(a.fits(space.num_factors()),
          "subset 0x" + a.hex() + " does not fit " + std::to_string(space.num_factors()) + " factors");
}

// E[X | all coordinates except k].
inline RandomVariable marginal_average(const RandomVariable& x, int k) {
  require_factor(*x.space(), k);
  RandomVariable out = x;
  detail::apply_factor_mix(*x.space(), k, out.mutable_values(), 1.0, 0.0);
  return out;
}

template <class Fn>
RandomVariable pointwise_map(Fn&& f, RandomVariable x) {
  for (auto& v : x.mutable_values()) v = Complex(f(v));
  return x;
}

// Real-valued variant: applies f to the real part, returns a real variable.
template <class Fn>
RandomVariable pointwise_map_real(Fn&& f, RandomVariable x) {
  for (auto& v : x.mutable_values()) v = Complex(f(v.real()), 0.0);
  return x;
}

template <class Fn>
RandomVariable pointwise_map2_real(Fn&& f, const RandomVariable& x, const RandomVariable& y) {
  require_same_space(x, y);
  RandomVariable out = x;
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = Complex(f(x[s].real(), y[s].real()), 0.0);
  return out;
}

}  // namespace noiselab

#endif  // NOISELAB_SPACE_HPP_
