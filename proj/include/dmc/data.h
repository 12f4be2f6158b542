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

#ifndef DMC_DATA_H_
#define DMC_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmc/matrix.h"

namespace dmc {

struct Rating {
  std::uint32_t user;
  std::uint32_t item;
  double value;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Observed entries of a users x items rating matrix, sorted by (user, item)
// with at most one entry per cell.
class RatingMatrix {
 public:
  RatingMatrix() = default;
  // Sorts the entries. Throws DataError on out-of-range indices, duplicate
  // cells or non-finite ratings.
  RatingMatrix(std::size_t users, std::size_t items, std::vector<Rating> entries);

  std::size_t users() const { return users_; }
  std::size_t items() const { return items_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Rating>& entries() const { return entries_; }

  MaskedIndexSet mask() const;
  std::vector<double> values() const;

  // Original identifiers, index -> id. Empty when none were recorded, in
  // which case the index itself is the identifier.
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  void set_ids(std::vector<std::string> user_ids,
               std::vector<std::string> item_ids);
  std::string user_id(std::size_t u) const;
  std::string item_id(std::size_t i) const;

  friend bool operator==(const RatingMatrix&, const RatingMatrix&) = default;

 private:
  std::size_t users_ = 0;
  std::size_t items_ = 0;
  std::vector<Rating> entries_;
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
};

// One raw line of a rating file.
struct RawRating {
  std::string user;
  std::string item;
  double value;
  std::size_t line;
};

// Reads `user,item,rating` lines; blank lines and lines starting with '#'
// are skipped. Throws ParseError with the 1-based line number.
std::vector<RawRating> read_raw_ratings(std::istream& in,
                                        const std::string& source);

// Builds a RatingMatrix from raw lines. An id column whose values are all
// non-negative integers is used directly (extent = max + 1); otherwise ids
// are numbered by first occurrence.
RatingMatrix index_ratings(const std::vector<RawRating>& raw,
                           const std::string& source);

RatingMatrix load_ratings(const std::filesystem::path& path);
RatingMatrix parse_ratings(std::istream& in, const std::string& source);

// Writes entries in (user, item) order using the original ids and the
// shortest round-trip decimal form of each rating.
void write_ratings(std::ostream& out, const RatingMatrix& ratings);
void save_ratings(const RatingMatrix& ratings, const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

struct SyntheticSpec {
  std::size_t users = 200;
  std::size_t items = 240;
  std::size_t rank = 8;
  double observe_fraction = 0.4;
  double noise_sd = 0.0;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  RatingMatrix ratings;
  // users x items, A * B with standard-normal A and B.
  Dense truth;
};

SyntheticData synth_low_rank(const SyntheticSpec& spec);

struct SplitDataset {
  RatingMatrix train;
  RatingMatrix test;
  std::uint64_t seed = 0;
};

// Uniform random partition of the observed entries with
// round(fraction * size) going to train. With per_user set, each user's
// entries are split separately.
SplitDataset split(const RatingMatrix& ratings, double fraction,
                   std::uint64_t seed, bool per_user = false);

struct Shard {
  std::size_t agent = 0;
  std::size_t col_start = 0;
  std::size_t col_end = 0;
  // users x (col_end - col_start), columns re-based to 0.
  RatingMatrix local;

  std::size_t width() const { return col_end - col_start; }
};

// Column range [start, end) owned by `agent` when `items` columns are split
// into `agents` contiguous blocks; the first items % agents blocks get one
// extra column.
std::pair<std::size_t, std::size_t> column_range(std::size_t items,
                                                 std::size_t agents,
                                                 std::size_t agent);

std::vector<Shard> partition_columns(const RatingMatrix& ratings,
                                     std::size_t agents);

// Restricts `ratings` to the columns of [col_start, col_end), re-based.
RatingMatrix restrict_columns(const RatingMatrix& ratings, std::size_t col_start,
                              std::size_t col_end);

}  // namespace dmc

#endif  // DMC_DATA_H_
