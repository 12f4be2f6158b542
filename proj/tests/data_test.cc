// Copyright 2026 The DMC Authors. All Rights Reserved.
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

#include "dmc/data.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "dmc/errors.h"

namespace dmc {
namespace {

std::filesystem::path TempPath(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "dmc_data_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string ReadAll(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RatingMatrix Parse(const std::string& text) {
  std::istringstream in(text);
  return parse_ratings(in, "inline");
}

TEST(LoadRatingsTest, IntegralIdsAreTakenAsGiven) {
  const RatingMatrix r = Parse("0,0,1.0\n1,2,1.0\n");
  EXPECT_EQ(r.users(), 2u);
  EXPECT_EQ(r.items(), 3u);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.entries()[1], (Rating{1, 2, 1.0}));
}

TEST(LoadRatingsTest, StringIdsAreRemappedByFirstOccurrence) {
  const RatingMatrix r = Parse("alice,img7,1\nbob,img3,1\nalice,img3,0.5\n");
  EXPECT_EQ(r.users(), 2u);
  EXPECT_EQ(r.items(), 2u);
  EXPECT_EQ(r.user_ids(), (std::vector<std::string>{"alice", "bob"}));
  EXPECT_EQ(r.item_ids(), (std::vector<std::string>{"img7", "img3"}));
  EXPECT_EQ(r.entries()[0], (Rating{0, 0, 1.0}));
  EXPECT_EQ(r.entries()[1], (Rating{0, 1, 0.5}));
}

TEST(LoadRatingsTest, CommentsBlankLinesAndWhitespace) {
  const RatingMatrix r = Parse("# header\n\n 0 , 1 , 2.5 \r\n#x,y,z\n");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.entries()[0], (Rating{0, 1, 2.5}));
}

TEST(LoadRatingsTest, MalformedLineReportsLineNumber) {
  try {
    Parse("0,0,1\n# c\n1,1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(Parse("0,0,abc\n"), ParseError);
  EXPECT_THROW(Parse("0,0,1,2\n"), ParseError);
  EXPECT_THROW(Parse(",0,1\n"), ParseError);
  EXPECT_THROW(Parse("0,0,inf\n"), ParseError);
}

TEST(LoadRatingsTest, DuplicateCellIsDataError) {
  EXPECT_THROW(Parse("0,0,1\n0,0,2\n"), DataError);
  EXPECT_THROW(Parse("a,b,1\nc,d,1\na,b,3\n"), DataError);
}

TEST(LoadRatingsTest, MissingFileIsDataError) {
  EXPECT_THROW(load_ratings("/nonexistent/ratings.csv"), DataError);
}

TEST(SaveRatingsTest, ThousandLineFixtureRoundTripsBitExactly) {
  std::mt19937_64 rng(99);
  std::set<std::pair<int, int>> cells;
  std::uniform_int_distribution<int> user(0, 79), item(0, 119);
  while (cells.size() < 1000) cells.insert({user(rng), item(rng)});
  std::normal_distribution<double> value(0.0, 3.0);
  std::string fixture;
  for (const auto& [u, i] : cells) {
    fixture += std::to_string(u) + "," + std::to_string(i) + "," +
               format_double(value(rng)) + "\n";
  }
  const auto in_path = TempPath("fixture.csv");
  const auto out_path = TempPath("fixture_out.csv");
  { std::ofstream(in_path, std::ios::binary) << fixture; }

  const RatingMatrix r = load_ratings(in_path);
  EXPECT_EQ(r.size(), 1000u);
  save_ratings(r, out_path);
  EXPECT_EQ(ReadAll(out_path), fixture);
  EXPECT_EQ(load_ratings(out_path), r);
}

TEST(SaveRatingsTest, StringIdsRoundTrip) {
  const RatingMatrix r = Parse("alice,img7,1\nbob,img3,0.1\n");
  std::ostringstream out;
  write_ratings(out, r);
  EXPECT_EQ(out.str(), "alice,img7,1\nbob,img3,0.1\n");
}

TEST(SynthTest, FullNoiselessObservationEqualsTruth) {
  const SyntheticData d = synth_low_rank({6, 5, 2, 1.0, 0.0, 3});
  ASSERT_EQ(d.ratings.size(), 30u);
  for (const Rating& e : d.ratings.entries()) EXPECT_EQ(e.value, d.truth(e.user, e.item));
}

TEST(SynthTest, DeterministicPerSeed) {
  const SyntheticSpec spec{20, 30, 3, 0.3, 0.1, 42};
  const SyntheticData a = synth_low_rank(spec);
  const SyntheticData b = synth_low_rank(spec);
  EXPECT_EQ(a.ratings, b.ratings);
  EXPECT_EQ(a.truth, b.truth);
  SyntheticSpec other = spec;
  other.seed = 43;
  EXPECT_NE(synth_low_rank(other).truth, a.truth);
}

TEST(SynthTest, ObservedCountIsRoundedFraction) {
  const SyntheticData d = synth_low_rank({200, 240, 8, 0.4, 0.0, 1});
  EXPECT_EQ(d.ratings.size(), 19200u);
  for (const Rating& e : d.ratings.entries()) ASSERT_EQ(e.value, d.truth(e.user, e.item));
}

TEST(SynthTest, InvalidSpecIsConfigError) {
  EXPECT_THROW(synth_low_rank({10, 10, 2, 0.0, 0.0, 1}), ConfigError);
  EXPECT_THROW(synth_low_rank({10, 10, 2, 1.5, 0.0, 1}), ConfigError);
  EXPECT_THROW(synth_low_rank({10, 10, 11, 0.5, 0.0, 1}), ConfigError);
  EXPECT_THROW(synth_low_rank({10, 10, 0, 0.5, 0.0, 1}), ConfigError);
  EXPECT_THROW(synth_low_rank({10, 10, 2, 0.5, -1.0, 1}), ConfigError);
}

RatingMatrix Sequential(std::size_t count) {
  std::vector<Rating> e;
  for (std::size_t k = 0; k < count; ++k) {
    e.push_back({static_cast<std::uint32_t>(k / 10), static_cast<std::uint32_t>(k % 10),
                 static_cast<double>(k)});
  }
  return RatingMatrix((count + 9) / 10, 10, std::move(e));
}

void ExpectPartition(const RatingMatrix& all, const SplitDataset& s) {
  std::vector<Rating> joined = s.train.entries();
  joined.insert(joined.end(), s.test.entries().begin(), s.test.entries().end());
  const RatingMatrix merged(all.users(), all.items(), joined);  // throws on overlap
  EXPECT_EQ(merged.entries(), all.entries());
}

TEST(SplitTest, SeventyFiveTwentyFive) {
  const RatingMatrix r = Sequential(100);
  const SplitDataset s = split(r, 0.75, 5);
  EXPECT_EQ(s.train.size(), 75u);
  EXPECT_EQ(s.test.size(), 25u);
  ExpectPartition(r, s);
}

TEST(SplitTest, TwoEntriesHalfAndHalf) {
  const SplitDataset s = split(Sequential(2), 0.5, 1);
  EXPECT_EQ(s.train.size(), 1u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(SplitTest, SeedControlsTheSplit) {
  const RatingMatrix r = Sequential(200);
  EXPECT_EQ(split(r, 0.75, 8).train, split(r, 0.75, 8).train);
  EXPECT_NE(split(r, 0.75, 8).train, split(r, 0.75, 9).train);
}

TEST(SplitTest, PerUserSplitsEachUser) {
  const RatingMatrix r = Sequential(200);
  const SplitDataset s = split(r, 0.75, 3, /*per_user=*/true);
  ExpectPartition(r, s);
  std::vector<int> per_user(r.users(), 0);
  for (const Rating& e : s.train.entries()) ++per_user[e.user];
  for (int c : per_user) EXPECT_EQ(c, 8);  // round(0.75 * 10)
}

TEST(SplitTest, Errors) {
  EXPECT_THROW(split(Sequential(1), 0.5, 1), DataError);
  EXPECT_THROW(split(Sequential(10), 0.0, 1), ConfigError);
  EXPECT_THROW(split(Sequential(10), 1.0, 1), ConfigError);
}

TEST(PartitionTest, RemainderGoesToTheFront) {
  const RatingMatrix r = Sequential(10);  // 1 user x 10 items
  const auto shards = partition_columns(r, 3);
  ASSERT_EQ(shards.size(), 3u);
  EXPECT_EQ(std::make_pair(shards[0].col_start, shards[0].col_end), std::make_pair(0ul, 4ul));
  EXPECT_EQ(std::make_pair(shards[1].col_start, shards[1].col_end), std::make_pair(4ul, 7ul));
  EXPECT_EQ(std::make_pair(shards[2].col_start, shards[2].col_end), std::make_pair(7ul, 10ul));
}

TEST(PartitionTest, SingleAgentOwnsEverything) {
  const RatingMatrix r = Sequential(30);
  const auto shards = partition_columns(r, 1);
  ASSERT_EQ(shards.size(), 1u);
  EXPECT_EQ(shards[0].local.entries(), r.entries());
}

// Every entry lands in exactly one shard and re-basing is reversible.
TEST(PartitionTest, ShardsReassembleTheInputExactly) {
  const SyntheticData d = synth_low_rank({37, 53, 3, 0.35, 0.2, 11});
  for (std::size_t agents : {1u, 2u, 5u, 8u, 53u}) {
    const auto shards = partition_columns(d.ratings, agents);
    std::vector<Rating> joined;
    std::size_t covered = 0;
    for (const Shard& s : shards) {
      EXPECT_EQ(s.col_start, covered);
      covered = s.col_end;
      EXPECT_LE(shards.front().width() - s.width(), 1u);
      for (const Rating& e : s.local.entries()) {
        ASSERT_LT(e.item, s.width());
        joined.push_back({e.user, static_cast<std::uint32_t>(e.item + s.col_start), e.value});
      }
    }
    EXPECT_EQ(covered, d.ratings.items());
    EXPECT_EQ(RatingMatrix(d.ratings.users(), d.ratings.items(), joined).entries(),
              d.ratings.entries());
  }
}

TEST(PartitionTest, TooManyAgentsIsConfigError) {
  EXPECT_THROW(partition_columns(Sequential(10), 11), ConfigError);
  EXPECT_THROW(partition_columns(Sequential(10), 0), ConfigError);
}

}  // namespace
}  // namespace dmc
