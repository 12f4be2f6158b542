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

#include "dmc/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmc/errors.h"
#include "dmc/io.h"

namespace dmc {
namespace {

constexpr const char* kManifestFormat = "dmc-factors-1";

std::string MatrixCsv(const Dense& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Dense ReadMatrixCsv(const std::filesystem::path& path, std::size_t rows,
                    std::size_t cols) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open factor file " + path.string());
  std::vector<double> values;
  values.reserve(rows * cols);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t start = 0;
    std::size_t fields = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(line.data() + start, line.data() + comma, v);
      if (ec != std::errc() || ptr != line.data() + comma) {
        throw ParseError(path.string(), line_no, "invalid number");
      }
      values.push_back(v);
      ++fields;
      start = comma + 1;
    }
    if (fields != cols) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(cols) + " columns");
    }
  }
  if (values.size() != rows * cols) {
    throw DataError(path.string() + ": expected " + std::to_string(rows) +
                    " rows");
  }
  return Dense(rows, cols, std::move(values));
}

}  // namespace

FactorModel::FactorModel(std::size_t users, std::size_t items,
                         std::vector<FactorBlock> blocks)
    : users_(users), items_(items), blocks_(std::move(blocks)), owner_(items) {
  std::size_t next = 0;
  const std::size_t r = blocks_.empty() ? 0 : blocks_.front().u.cols();
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const FactorBlock& blk = blocks_[b];
    if (blk.col_start != next || blk.col_end < blk.col_start) {
      throw ConfigError("factor blocks must be contiguous and ordered");
    }
    if (blk.u.rows() != users || blk.u.cols() != r || blk.v.rows() != r ||
        blk.v.cols() != blk.col_end - blk.col_start) {
      throw ConfigError("factor block " + std::to_string(b) +
                        " has inconsistent dimensions");
    }
    for (std::size_t j = blk.col_start; j < blk.col_end; ++j) owner_[j] = b;
    next = blk.col_end;
  }
  if (next != items) throw ConfigError("factor blocks do not cover all items");
}

std::size_t FactorModel::rank() const {
  return blocks_.empty() ? 0 : blocks_.front().u.cols();
}

double FactorModel::predict(std::size_t user, std::size_t item) const {
  const FactorBlock& blk = blocks_[owner_[item]];
  const std::size_t col = item - blk.col_start;
  const auto urow = blk.u.row(user);
  double sum = 0.0;
  for (std::size_t p = 0; p < urow.size(); ++p) sum += urow[p] * blk.v(p, col);
  return sum;
}

FactorModel FactorModel::with_mean_user_factors() const {
  if (blocks_.empty()) return *this;
  Dense mean(users_, rank());
  for (const FactorBlock& blk : blocks_) add_scaled(mean, 1.0, blk.u);
  scale(mean, 1.0 / static_cast<double>(blocks_.size()));
  std::vector<FactorBlock> blocks = blocks_;
  for (FactorBlock& blk : blocks) blk.u = mean;
  FactorModel out(users_, items_, std::move(blocks));
  out.user_ids = user_ids;
  out.item_ids = item_ids;
  return out;
}

void save_factor_model(const FactorModel& model,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = kManifestFormat;
  manifest["users"] = model.users();
  manifest["items"] = model.items();
  manifest["rank"] = model.rank();
  manifest["user_ids"] = model.user_ids;
  manifest["item_ids"] = model.item_ids;
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t b = 0; b < model.blocks().size(); ++b) {
    const FactorBlock& blk = model.blocks()[b];
    const std::string u_name = "U_" + std::to_string(b) + ".csv";
    const std::string v_name = "V_" + std::to_string(b) + ".csv";
    write_file_atomic(dir / u_name, MatrixCsv(blk.u));
    write_file_atomic(dir / v_name, MatrixCsv(blk.v));
    blocks.push_back({{"col_start", blk.col_start},
                      {"col_end", blk.col_end},
                      {"u", u_name},
                      {"v", v_name}});
  }
  manifest["blocks"] = std::move(blocks);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

FactorModel load_factor_model(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DataError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
    if (manifest.at("format").get<std::string>() != kManifestFormat) {
      throw DataError("unsupported factor dump format");
    }
    const auto users = manifest.at("users").get<std::size_t>();
    const auto items = manifest.at("items").get<std::size_t>();
    const auto rank = manifest.at("rank").get<std::size_t>();
    std::vector<FactorBlock> blocks;
    for (const auto& b : manifest.at("blocks")) {
      FactorBlock blk;
      blk.col_start = b.at("col_start").get<std::size_t>();
      blk.col_end = b.at("col_end").get<std::size_t>();
      if (blk.col_end < blk.col_start) throw DataError("bad block column range");
      blk.u = ReadMatrixCsv(dir / b.at("u").get<std::string>(), users, rank);
      blk.v = ReadMatrixCsv(dir / b.at("v").get<std::string>(), rank,
                            blk.col_end - blk.col_start);
      blocks.push_back(std::move(blk));
    }
    FactorModel model(users, items, std::move(blocks));
    model.user_ids = manifest.value("user_ids", std::vector<std::string>{});
    model.item_ids = manifest.value("item_ids", std::vector<std::string>{});
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(dir.string() + "/manifest.json: " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(dir.string() + ": " + e.what());
  }
}

double rmse(const FactorModel& model, const RatingMatrix& truth) {
  if (truth.empty()) throw DataError("rmse: no entries to evaluate");
  if (truth.users() > model.users() || truth.items() > model.items()) {
    throw DataError("rmse: evaluation matrix is larger than the model");
  }
  double sum = 0.0;
  for (const Rating& e : truth.entries()) {
    const double d = model.predict(e.user, e.item) - e.value;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

std::optional<double> aps_user(std::span<const ScoredItem> scores,
                               const std::unordered_set<std::uint32_t>& liked) {
  if (liked.empty()) return std::nullopt;
  std::vector<ScoredItem> ranked(scores.begin(), scores.end());
  for (const ScoredItem& s : ranked) {
    if (std::isnan(s.score)) throw DataError("aps_user: NaN score");
  }
  // Ties are resolved by midrank below, so the secondary key only makes the
  // sort deterministic.
  std::sort(ranked.begin(), ranked.end(),
            [](const ScoredItem& a, const ScoredItem& b) {
              return a.score != b.score ? a.score > b.score : a.item < b.item;
            });
  const auto n = static_cast<double>(ranked.size());
  double total = 0.0;
  std::size_t found = 0;
  std::size_t begin = 0;
  while (begin < ranked.size()) {
    std::size_t end = begin + 1;
    while (end < ranked.size() && ranked[end].score == ranked[begin].score) ++end;
    // 1-based positions begin+1 .. end share their mean.
    const double midrank = (static_cast<double>(begin + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = begin; k < end; ++k) {
      if (liked.count(ranked[k].item) != 0) {
        total += 100.0 * midrank / n;
        ++found;
      }
    }
    begin = end;
  }
  if (found != liked.size()) {
    throw DataError("aps_user: liked item missing from the scored items");
  }
  return total / static_cast<double>(found);
}

RankingResult maps(const Scorer& score, const RatingMatrix& test,
                   double like_threshold) {
  if (test.empty()) throw DataError("maps: empty test set");
  RankingResult result;
  const auto& entries = test.entries();
  std::size_t begin = 0;
  std::vector<ScoredItem> scored;
  std::unordered_set<std::uint32_t> liked;
  while (begin < entries.size()) {
    const std::uint32_t user = entries[begin].user;
    scored.clear();
    liked.clear();
    std::size_t end = begin;
    for (; end < entries.size() && entries[end].user == user; ++end) {
      scored.push_back({entries[end].item, score(user, entries[end].item)});
      if (entries[end].value >= like_threshold) liked.insert(entries[end].item);
    }
    if (const auto aps = aps_user(scored, liked)) {
      result.user_aps.emplace(user, *aps);
    } else {
      ++result.skipped_users;
    }
    begin = end;
  }
  if (result.user_aps.empty()) {
    throw DataError("maps: no user has a test rating >= like threshold " +
                    format_double(like_threshold));
  }
  double total = 0.0;
  for (const auto& [user, aps] : result.user_aps) total += aps;
  result.counted_users = result.user_aps.size();
  result.maps = total / static_cast<double>(result.counted_users);
  return result;
}

RankingResult maps(const FactorModel& model, const RatingMatrix& test,
                   double like_threshold) {
  if (test.users() > model.users() || test.items() > model.items()) {
    throw DataError("maps: test matrix is larger than the model");
  }
  return maps(
      [&model](std::size_t u, std::size_t i) { return model.predict(u, i); },
      test, like_threshold);
}

}  // namespace dmc
