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

#ifndef DMC_EVAL_H_
#define DMC_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dmc/data.h"
#include "dmc/matrix.h"

namespace dmc {

// Factors that own the item columns [col_start, col_end): score(u, j) is
// row u of `u` dotted with column (j - col_start) of `v`.
struct FactorBlock {
  std::size_t col_start = 0;
  std::size_t col_end = 0;
  Dense u;  // users x rank
  Dense v;  // rank x (col_end - col_start)
};

// A predictor assembled from column blocks. A centralized model is a single
// block; a decentralized one has one block per agent, each with that agent's
// own user factors.
class FactorModel {
 public:
  FactorModel() = default;
  // Blocks must be contiguous, ordered and cover [0, items). Throws
  // ConfigError otherwise.
  FactorModel(std::size_t users, std::size_t items, std::vector<FactorBlock> blocks);

  std::size_t users() const { return users_; }
  std::size_t items() const { return items_; }
  std::size_t rank() const;
  std::span<const FactorBlock> blocks() const { return blocks_; }

  double predict(std::size_t user, std::size_t item) const;

  // Same column blocks, every block using the element-wise mean of all
  // blocks' user factors.
  FactorModel with_mean_user_factors() const;

  // Original ids for reporting, index -> id; empty means the index is the id.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

 private:
  std::size_t users_ = 0;
  std::size_t items_ = 0;
  std::vector<FactorBlock> blocks_;
  std::vector<std::size_t> owner_;  // item -> block
};

// Factor dump: manifest.json plus U_<k>.csv / V_<k>.csv per block.
void save_factor_model(const FactorModel& model, const std::filesystem::path& dir);
FactorModel load_factor_model(const std::filesystem::path& dir);

// Root mean squared error of the model over the entries of `truth`. Throws
// DataError if `truth` is empty or references cells outside the model.
double rmse(const FactorModel& model, const RatingMatrix& truth);

struct ScoredItem {
  std::uint32_t item;
  double score;
};

// Mean percentile of the liked items when `scores` are ranked by decreasing
// score. Rank k (1-based; tied scores share their midrank) among n items has
// percentile 100 * k / n. Returns nullopt when `liked` is empty. Throws
// DataError if a liked item is not among the scored items.
std::optional<double> aps_user(std::span<const ScoredItem> scores,
                               const std::unordered_set<std::uint32_t>& liked);

struct RankingResult {
  std::map<std::uint32_t, double> user_aps;
  double maps = 0.0;
  std::size_t counted_users = 0;
  // Users with test items but none at or above the like threshold.
  std::size_t skipped_users = 0;
};

// Per user: ranks that user's test items by model score; liked items are
// those with rating >= like_threshold. mAPS averages over users with at
// least one liked item. Throws DataError if `test` is empty or no user has a
// liked item.
RankingResult maps(const FactorModel& model, const RatingMatrix& test,
                   double like_threshold);

using Scorer = std::function<double(std::size_t user, std::size_t item)>;
RankingResult maps(const Scorer& score, const RatingMatrix& test,
                   double like_threshold);

}  // namespace dmc

#endif  // DMC_EVAL_H_
