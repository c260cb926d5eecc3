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

#include "noiselab/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace noiselab {
namespace {

TEST(SpaceJson, RoundTripPreservesHash) {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 20; ++i) {
    auto s = testing::random_space(rng, 1, 5, 4);
    const auto text = io::space_to_json(*s).dump();
    const auto back = io::space_from_json(io::parse_json(text, "mem"));
    EXPECT_EQ(back->hash_hex(), s->hash_hex());
    EXPECT_TRUE(same_space(back, s));
  }
}

TEST(SpaceJson, NumericLabelsAccepted) {
  const auto s = io::space_from_json(io::parse_json(R"({"factors":[{"outcomes":[-1,1],"probs":[0.5,0.5]}]})", "mem"));
  EXPECT_EQ(s->factor(0).outcomes()[0], "-1");
  EXPECT_EQ(s->hash_hex(), testing::coins(1)->hash_hex());
}

TEST(SpaceJson, ErrorsNameTheFactor) {
  try {
    io::space_from_json(io::parse_json(
        R"({"factors":[{"outcomes":[0,1],"probs":[0.5,0.5]},{"outcomes":[0,1],"probs":[0.5,0.4]}]})", "mem"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_EQ(std::string(e.what()), "factor 1: probabilities sum to 0.9");
  }
  try {
    io::space_from_json(io::parse_json(R"({"factor":[]})", "mem"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
}

TEST(ParseJson, ReportsLineAndColumn) {
  try {
    io::parse_json("{\n  \"factors\": [\n    {,}\n  ]\n}", "space.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_EQ(std::string(e.what()).rfind("space.json:3:", 0), 0u) << e.what();
  }
}

TEST(RvJson, RoundTripIsExact) {
  std::mt19937_64 rng(72);
  for (int i = 0; i < 20; ++i) {
    auto s = testing::random_space(rng, 1, 4, 3);
    const auto x = testing::random_rv(rng, s);
    const auto back = io::rv_from_json(io::parse_json(io::rv_to_json(x).dump(), "mem"), s);
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(back[k], x[k]);
  }
}

TEST(RvJson, RejectsMismatchedSpaceAndLength) {
  auto s = testing::coins(2);
  auto other = testing::coins(3);
  const auto j = io::rv_to_json(RandomVariable::constant(other, 1.0));
  EXPECT_THROW(io::rv_from_json(j, s), Error);
  const auto short_rv = io::parse_json(R"({"values":[1,2,3]})", "mem");
  EXPECT_THROW(io::rv_from_json(short_rv, s), Error);
  const auto bad = io::parse_json(R"({"values":[1,2,3,"x"]})", "mem");
  try {
    io::rv_from_json(bad, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
}

TEST(FormatDouble, RoundTrips) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> exp_dist(-300.0, 300.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::pow(10.0, exp_dist(rng)) * (rng() % 2 ? 1.0 : -1.0);
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(io::format_double(std::nan("")), "nan");
}

TEST(TGrid, Forms) {
  const auto g = io::parse_t_grid("0:0.1:3");
  ASSERT_EQ(g.size(), 31u);
  EXPECT_DOUBLE_EQ(g.back(), 3.0);
  EXPECT_EQ(io::parse_t_grid("0.5"), std::vector<double>{0.5});
  EXPECT_EQ(io::parse_t_grid("0,0.5,2"), (std::vector<double>{0.0, 0.5, 2.0}));
  EXPECT_THROW(io::parse_t_grid("0:x:1"), Error);
  EXPECT_THROW(io::parse_t_grid("0:0:1"), Error);
  EXPECT_THROW(io::parse_t_grid("0:1"), Error);
}

TEST(DecompositionJson, DropsNegligibleComponents) {
  auto s = testing::coins(2);
  const auto dj = io::decomposition_to_json(decompose(RandomVariable::constant(s, 2.0)), 1e-10, {});
  ASSERT_EQ(dj["components"].size(), 1u);
  EXPECT_TRUE(dj["components"].contains("0"));
  const auto x = testing::omega(s, 0) * testing::omega(s, 1) + testing::omega(s, 1);
  const auto dx = io::decomposition_to_json(decompose(x), 1e-10, {});
  EXPECT_TRUE(dx["components"].contains("3"));
  EXPECT_TRUE(dx["components"].contains("2"));
  EXPECT_EQ(dx["components"].size(), 2u);
}

TEST(WriteFileAtomic, ReplacesContent) {
  const auto path = std::filesystem::temp_directory_path() / "noiselab_io_test.txt";
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  EXPECT_EQ(io::read_file(path), "second");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace noiselab
