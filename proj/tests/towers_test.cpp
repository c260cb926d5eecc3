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

#include "noiselab/towers.hpp"

#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace noiselab {
namespace {

using testing::coins;
using testing::omega;

constexpr double kTol = 1e-10;

// Brute-force coarse level: sum of project_HA over fine subsets touching
// exactly n blocks.
RandomVariable oracle_coarse_level(const RandomVariable& x, const Partition& p, int n) {
  RandomVariable out = RandomVariable::zero(x.space());
  for_each_subset(x.space()->full_set(), [&](SubsetIndex s) {
    if (touched(s, p) == n) out += testing::inclusion_exclusion_component(x, s);
  });
  return out;
}

TEST(Partition, ParseAndValidate) {
  const auto p = Partition::parse("0,1|2", 3);
  ASSERT_EQ(p.num_blocks(), 2u);
  EXPECT_EQ(p.blocks()[0], SubsetIndex::of({0, 1}));
  EXPECT_EQ(p.to_string(), "0,1|2");
  EXPECT_EQ(Partition::parse("2|1,0", 3).to_string(), "0,1|2");
  EXPECT_THROW(Partition::parse("0,1", 3), Error);
  EXPECT_THROW(Partition::parse("0,1|1,2", 3), Error);
  EXPECT_THROW(Partition::parse("0,x|1,2", 3), Error);
  EXPECT_THROW(Partition::parse("0||1,2", 3), Error);
  EXPECT_THROW(Partition::parse("0|1|3", 3), Error);
}

TEST(Partition, EnumerationCountsBellNumbers) {
  const std::size_t bell[] = {1, 2, 5, 15, 52, 203};
  for (int m = 1; m <= 6; ++m) {
    const auto all = enumerate_partitions(m);
    EXPECT_EQ(all.size(), bell[m - 1]);
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) EXPECT_FALSE(all[i] == all[j]);
    }
  }
}

TEST(Tower, ParseChecksRefinement) {
  const auto t = Tower::parse("0,1|2;0|1|2", 3);
  EXPECT_EQ(t.stages().size(), 2u);
  EXPECT_THROW(Tower::parse("0|1|2;0,1|2", 3), Error);
}

TEST(Saturation, Examples) {
  const auto p = Partition::parse("0,1|2", 3);
  EXPECT_EQ(saturation(SubsetIndex::of({0}), p), SubsetIndex::of({0, 1}));
  EXPECT_EQ(saturation(SubsetIndex::empty(), p), SubsetIndex::empty());
  const auto d = Partition::discrete(4);
  for_each_subset(SubsetIndex::full(4), [&](SubsetIndex s) { EXPECT_EQ(saturation(s, d), s); });
}

TEST(Saturation, IdempotentAndMonotone) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 50; ++i) {
    const auto p = testing::random_partition(rng, 6);
    const SubsetIndex a(rng() & 63), b(rng() & 63);
    EXPECT_EQ(saturation(saturation(a, p), p), saturation(a, p));
    EXPECT_TRUE(saturation(a & b, p).is_subset_of(saturation(a, p)));
    EXPECT_TRUE(a.is_subset_of(saturation(a, p)));
  }
}

TEST(CoarseLevel, Examples) {
  std::mt19937_64 rng(52);
  auto s = testing::random_space(rng, 3, 3, 3);
  const auto x = testing::random_rv(rng, s);
  for (int n = 0; n <= 3; ++n) {
    EXPECT_TRUE(approx_equal(coarse_level_project(x, Partition::discrete(3), n), level_project(x, n), kTol));
  }
  const auto single = Partition::single_block(3);
  EXPECT_TRUE(approx_equal(coarse_level_project(x, single, 1), x - RandomVariable::constant(s, expectation(x)), kTol));

  auto c = coins(2);
  const auto prod = omega(c, 0) * omega(c, 1);
  EXPECT_TRUE(approx_equal(coarse_level_project(prod, Partition::single_block(2), 1), prod, kTol));
  EXPECT_TRUE(approx_equal(level_project(prod, 2), prod, kTol));
  EXPECT_THROW(coarse_level_project(prod, Partition::single_block(2), 2), Error);
}

TEST(CoarseLevel, MatchesBruteForceAndSumsToX) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 10; ++i) {
    auto s = testing::random_space(rng, 1, 4, 3);
    const auto x = testing::random_rv(rng, s);
    const auto p = testing::random_partition(rng, s->num_factors());
    RandomVariable sum = RandomVariable::zero(s);
    for (int n = 0; n <= static_cast<int>(p.num_blocks()); ++n) {
      const auto lvl = coarse_level_project(x, p, n);
      EXPECT_TRUE(approx_equal(lvl, oracle_coarse_level(x, p, n), kTol));
      sum += lvl;
    }
    EXPECT_TRUE(approx_equal(sum, x, kTol));
  }
}

TEST(CoarseNoise, Examples) {
  std::mt19937_64 rng(54);
  auto s = testing::random_space(rng, 3, 3, 3);
  const auto x = testing::random_rv(rng, s);
  const double t = 0.7;
  EXPECT_TRUE(approx_equal(coarse_noise_operator(x, Partition::discrete(3), t), noise_operator(x, t), kTol));
  const auto mean = RandomVariable::constant(s, expectation(x));
  EXPECT_TRUE(approx_equal(coarse_noise_operator(x, Partition::single_block(3), t),
                           mean + (x - mean) * Complex(std::exp(-t)), kTol));
  EXPECT_THROW(coarse_noise_operator(x, Partition::discrete(3), -1.0), Error);
}

TEST(CoarseNoise, SpectralDefinition) {
  std::mt19937_64 rng(55);
  for (int i = 0; i < 10; ++i) {
    auto s = testing::random_space(rng, 1, 4, 3);
    const auto x = testing::random_rv(rng, s);
    const auto p = testing::random_partition(rng, s->num_factors());
    const double t = 0.45;
    RandomVariable expected = RandomVariable::zero(s);
    for_each_subset(s->full_set(), [&](SubsetIndex sub) {
      expected += testing::inclusion_exclusion_component(x, sub) * Complex(std::exp(-t * touched(sub, p)));
    });
    EXPECT_TRUE(approx_equal(coarse_noise_operator(x, p, t), expected, kTol));
  }
}

TEST(CheckMonotone, Examples) {
  auto c = coins(2);
  const auto prod = omega(c, 0) * omega(c, 1);
  const auto r = check_monotone(prod, 0.5, Partition::single_block(2), Partition::discrete(2));
  EXPECT_NEAR(r.coarse.n_form, 1.0, kTol);
  EXPECT_NEAR(r.fine.n_form, 2.0, kTol);
  EXPECT_TRUE(r.holds());

  // Each block meets the support of X in at most one factor: forms coincide.
  auto s = coins(3);
  const auto x = omega(s, 0) + omega(s, 2);
  const auto eq = check_monotone(x, 0.5, Partition::parse("0,1|2", 3), Partition::discrete(3));
  EXPECT_NEAR(eq.coarse.n_form, eq.fine.n_form, kTol);
  EXPECT_NEAR(eq.coarse.u_form, eq.fine.u_form, kTol);

  EXPECT_THROW(check_monotone(prod, 0.5, Partition::discrete(2), Partition::single_block(2)), Error);
}

TEST(CheckMonotone, RandomRefinementPairs) {
  std::mt19937_64 rng(56);
  for (int i = 0; i < 200; ++i) {
    auto s = testing::random_space(rng, 1, 6, 2);
    const int m = s->num_factors();
    const auto coarse = testing::random_partition(rng, m);
    const auto fine = testing::random_refinement(rng, coarse);
    const auto x = testing::random_rv(rng, s);
    const double t = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    EXPECT_TRUE(check_monotone(x, t, coarse, fine).holds()) << coarse.to_string() << " vs " << fine.to_string();
    for_each_subset(s->full_set(), [&](SubsetIndex sub) { EXPECT_LE(touched(sub, coarse), touched(sub, fine)); });
  }
}

TEST(Towers, InterleavedChainsShareTerminalValues) {
  std::mt19937_64 rng(57);
  for (int i = 0; i < 20; ++i) {
    auto s = testing::random_space(rng, 2, 5, 2);
    const int m = s->num_factors();
    const auto x = testing::random_rv(rng, s);
    // Build A1 <= B1 <= A2 <= B2 <= ... ending at the discrete partition.
    std::vector<Partition> chain = {Partition::single_block(m)};
    while (chain.back().num_blocks() < static_cast<std::size_t>(m)) {
      auto next = testing::random_refinement(rng, chain.back());
      if (next.num_blocks() == chain.back().num_blocks()) continue;
      chain.push_back(next);
    }
    std::vector<Partition> a, b;
    for (std::size_t j = 0; j < chain.size(); ++j) (j % 2 == 0 ? a : b).push_back(chain[j]);
    if (!(a.back() == chain.back())) a.push_back(chain.back());
    if (!(b.back() == chain.back())) b.push_back(chain.back());
    const double t = 0.5;
    const auto fa = tower_forms(x, Tower(a), t);
    const auto fb = tower_forms(x, Tower(b), t);
    const auto merged = tower_forms(x, Tower(chain), t);
    for (std::size_t j = 1; j < merged.size(); ++j) {
      EXPECT_GE(merged[j - 1].u_form, merged[j].u_form - kTol);
      EXPECT_LE(merged[j - 1].n_form, merged[j].n_form + kTol);
    }
    EXPECT_NEAR(fa.back().u_form, fb.back().u_form, kTol);
    EXPECT_NEAR(fa.back().n_form, fb.back().n_form, kTol);
    EXPECT_NEAR(fa.back().u_form, inner(noise_operator(x, t), x).real(), kTol);
  }
}

TEST(H1PartitionTest, Examples) {
  auto s = coins(2);
  const auto w1 = omega(s, 0);
  const auto w2 = omega(s, 1);
  EXPECT_TRUE(h1_partition_test(w1 + w2, enumerate_partitions(2)));
  EXPECT_FALSE(h1_partition_test(w1 * w2, {Partition::discrete(2)}));
  EXPECT_FALSE(h1_partition_test(RandomVariable::constant(s, 1.0), {Partition::discrete(2)}));
}

TEST(H1PartitionTest, AgreesWithSpectralTest) {
  std::mt19937_64 rng(58);
  for (int i = 0; i < 40; ++i) {
    auto s = testing::random_space(rng, 2, 4, 3);
    RandomVariable x = testing::random_h1(rng, s);
    if (i % 2 == 1) x += project_HA(testing::random_rv(rng, s), SubsetIndex(rng() & s->full_set().bits()));
    EXPECT_EQ(h1_partition_test(x, enumerate_partitions(s->num_factors())), is_in_H1(x).in_h1);
  }
}

}  // namespace
}  // namespace noiselab
