// Copyright 2026 The mtnas Authors.
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


#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mtnas/search_space.hpp"

namespace mtnas {
namespace {

using testing::Genome2;

TEST(SpaceSize, ProductionSpaceIsTwoToTheEighty) {
  boost::multiprecision::cpp_int expected = 1;
  expected <<= 80;
  EXPECT_EQ(space_size(), expected);
  EXPECT_EQ(space_size().str(), "1208925819614629174706176");
}

TEST(SpaceSize, RestrictedSpaces) {
  EXPECT_EQ(space_size(1), 32);
  EXPECT_EQ(space_size(2), 1024);
}

TEST(RandomGenome, DeterministicPerSeed) {
  std::mt19937_64 a(42);
  std::mt19937_64 b(42);
  EXPECT_EQ(random_genome<16>(a), random_genome<16>(b));
  std::mt19937_64 c(43);
  std::mt19937_64 d(42);
  EXPECT_NE(random_genome<16>(c), random_genome<16>(d));
}

TEST(RandomGenome, OptionFrequenciesWithinFiveSigma) {
  constexpr int kSamples = 10000;
  std::mt19937_64 rng(7);
  std::vector<std::vector<int>> counts(Genome::kNumFields);
  for (std::size_t f = 0; f < Genome::kNumFields; ++f) {
    counts[f].assign(Genome::field_cardinality(f), 0);
  }
  for (int i = 0; i < kSamples; ++i) {
    const Genome g = random_genome<16>(rng);
    for (std::size_t f = 0; f < Genome::kNumFields; ++f) ++counts[f][g.field(f)];
  }
  for (std::size_t f = 0; f < Genome::kNumFields; ++f) {
    const double p = 1.0 / counts[f].size();
    const double sigma = std::sqrt(kSamples * p * (1 - p));
    for (int c : counts[f]) EXPECT_LE(std::abs(c - kSamples * p), 5 * sigma) << "field " << f;
  }
}

TEST(Mutate, ChangesExactlyOneField) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const Genome parent = random_genome<16>(rng);
    const Genome child = mutate(parent, rng);
    int diffs = 0;
    for (std::size_t f = 0; f < Genome::kNumFields; ++f) diffs += parent.field(f) != child.field(f);
    EXPECT_EQ(diffs, 1);
  }
}

TEST(Mutate, BinaryFieldAlwaysFlips) {
  std::mt19937_64 rng(11);
  const Genome parent;
  for (int i = 0; i < 500; ++i) {
    const Genome child = mutate(parent, rng);
    for (std::size_t f = 0; f < Genome::kNumFields; ++f) {
      if (child.field(f) != parent.field(f) && Genome::field_cardinality(f) == 2) {
        EXPECT_EQ(child.field(f), 1 - parent.field(f));
      }
    }
  }
}

TEST(Mutate, FieldSelectionIsUniform) {
  constexpr int kTrials = 64000;
  std::mt19937_64 rng(5);
  const Genome parent;
  std::vector<int> hits(Genome::kNumFields, 0);
  for (int i = 0; i < kTrials; ++i) {
    const Genome child = mutate(parent, rng);
    for (std::size_t f = 0; f < Genome::kNumFields; ++f) {
      if (child.field(f) != parent.field(f)) ++hits[f];
    }
  }
  const double p = 1.0 / 64;
  const double sigma = std::sqrt(kTrials * p * (1 - p));
  for (int h : hits) EXPECT_LE(std::abs(h - kTrials * p), 5 * sigma);
}

TEST(Mutate, FourWayFieldReachesEveryOtherValue) {
  std::mt19937_64 rng(9);
  BasicGenome<1> parent;
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto child = mutate(parent, rng);
    if (child.field(2) != parent.field(2)) seen.insert(child.field(2));
  }
  EXPECT_EQ(seen, (std::set<int>{0, 1, 3}));
}

TEST(Decode, MultiTaskBackboneCellForCell) {
  const Architecture a = decode(decode_key<16>(testing::kMultiTaskKey));
  EXPECT_EQ(testing::as_tuples(a), testing::kMultiTaskRows);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].index, int(i));
}

TEST(Decode, SingleTaskBackboneCellForCell) {
  const Architecture a = decode(decode_key<16>(testing::kSingleTaskKey));
  EXPECT_EQ(testing::as_tuples(a), testing::kSingleTaskRows);
}

TEST(Decode, IdentityMultiplierGivesBaseChannels) {
  Genome g;
  for (std::size_t b = 0; b < 16; ++b) {
    g[b] = {LayerType::kIBN, Kernel::k3, ChannelMultiplier::k1_0, Expansion::k6};
  }
  const Architecture a = decode(g);
  ASSERT_EQ(a.rows.size(), 17u);
  EXPECT_EQ(a.rows[0], stem_row());
  for (std::size_t b = 0; b < 16; ++b) {
    EXPECT_EQ(a.rows[b + 1].filters, BackboneSkeleton::kBaseChannels[b]);
    EXPECT_EQ(a.rows[b + 1].stride, BackboneSkeleton::kStrides[b]);
    EXPECT_EQ(*a.rows[b + 1].expansion, b == 0 ? 1 : 6);
  }
}

TEST(Decode, TwoBlockSpaceHasDistinctKeys) {
  const auto all = testing::enumerate_two_block_space();
  std::set<std::string> keys;
  for (const auto& g : all) {
    keys.insert(encode_key(g));
    const Architecture a = decode(g);
    EXPECT_EQ(a.rows.size(), 3u);
  }
  EXPECT_EQ(keys.size(), 1024u);
}

TEST(GenomeKey, RoundTripsRandomGenomes) {
  std::mt19937_64 rng(1);
  std::set<std::string> keys;
  for (int i = 0; i < 1000; ++i) {
    const Genome g = random_genome<16>(rng);
    const std::string key = encode_key(g);
    EXPECT_EQ(decode_key<16>(key), g);
    keys.insert(key);
  }
  EXPECT_EQ(keys.size(), 1000u);
}

TEST(GenomeKey, StableSpelling) {
  Genome2 g;
  g[0] = {LayerType::kFusedIBN, Kernel::k5, ChannelMultiplier::k0_75, Expansion::k3};
  g[1] = {LayerType::kIBN, Kernel::k3, ChannelMultiplier::k1_5, Expansion::k6};
  EXPECT_EQ(encode_key(g), "F5x0.75e3-I3x1.5e6");
}

TEST(GenomeKey, MalformedKeysReportOffset) {
  struct Case {
    std::string key;
    std::size_t offset;
  };
  const std::vector<Case> cases = {
      {"", 0},
      {"X3x1.0e6-I3x1.0e6", 0},
      {"I4x1.0e6-I3x1.0e6", 1},
      {"I3y1.0e6-I3x1.0e6", 2},
      {"I3x2.0e6-I3x1.0e6", 3},
      {"I3x1.0e4-I3x1.0e6", 7},
      {"I3x1.0e6+I3x1.0e6", 8},
      {"I3x1.0e6", 8},
      {"I3x1.0e6-I3x1.0e6-", 17},
  };
  for (const auto& c : cases) {
    try {
      decode_key<2>(c.key);
      ADD_FAILURE() << "accepted '" << c.key << "'";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.position(), c.offset) << c.key;
    }
  }
}

TEST(ArchitectureText, RoundTrip) {
  const Architecture a = decode(decode_key<16>(testing::kMultiTaskKey));
  std::istringstream is(architecture_to_string(a));
  EXPECT_EQ(read_architecture(is), a);
}

TEST(ArchitectureText, StemExpansionIsDashes) {
  const std::string text = architecture_to_string(decode(Genome2{}));
  EXPECT_NE(text.find("0,Conv2D,2,3,32,--\n"), std::string::npos);
}

TEST(ArchitectureText, RejectsBadRows) {
  std::istringstream bad("index,layer,stride,kernel,filters,expansion\n1,Dense,1,3,16,1\n");
  EXPECT_THROW(read_architecture(bad), ParseError);
  std::istringstream short_row("index,layer,stride,kernel,filters,expansion\n1,IBN,1\n");
  EXPECT_THROW(read_architecture(short_row), ParseError);
}

TEST(LayerChoice, RejectsOutOfDomain) {
  LayerChoice c;
  EXPECT_THROW(c.set_option(2, 4), DomainError);
  EXPECT_THROW(c.set_option(4, 0), DomainError);
  EXPECT_THROW(c.set_option(0, -1), DomainError);
}

}  // namespace
}  // namespace mtnas
