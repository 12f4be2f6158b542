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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "dmc/errors.h"
#include "dmc/io.h"
#include "dmc/random.h"

namespace dmc {
namespace {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Canonical non-negative decimal integer: digits only, no leading zeros.
bool ParseIndex(std::string_view s, std::uint32_t& out) {
  if (s.empty() || (s.size() > 1 && s.front() == '0')) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct IdColumn {
  std::vector<std::uint32_t> index;  // per raw line
  std::vector<std::string> names;    // index -> id
};

IdColumn IndexIds(const std::vector<RawRating>& raw,
                  std::string RawRating::*field) {
  IdColumn col;
  col.index.resize(raw.size());
  bool integral = true;
  std::uint32_t max_id = 0;
  for (std::size_t k = 0; k < raw.size() && integral; ++k) {
    std::uint32_t v = 0;
    if (!ParseIndex(raw[k].*field, v) || v == UINT32_MAX) {
      integral = false;
    } else {
      col.index[k] = v;
      max_id = std::max(max_id, v);
    }
  }
  if (integral) {
    const std::size_t extent = raw.empty() ? 0 : std::size_t{max_id} + 1;
    col.names.reserve(extent);
    for (std::size_t i = 0; i < extent; ++i) col.names.push_back(std::to_string(i));
    return col;
  }
  std::unordered_map<std::string, std::uint32_t> seen;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const std::string& id = raw[k].*field;
    auto [it, inserted] =
        seen.emplace(id, static_cast<std::uint32_t>(col.names.size()));
    if (inserted) col.names.push_back(id);
    col.index[k] = it->second;
  }
  return col;
}

}  // namespace

RatingMatrix::RatingMatrix(std::size_t users, std::size_t items,
                           std::vector<Rating> entries)
    : users_(users), items_(items), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Rating& a, const Rating& b) {
              return a.user != b.user ? a.user < b.user : a.item < b.item;
            });
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Rating& e = entries_[k];
    if (e.user >= users_ || e.item >= items_) {
      throw DataError("rating (" + std::to_string(e.user) + "," +
                      std::to_string(e.item) + ") outside " +
                      std::to_string(users_) + "x" + std::to_string(items_));
    }
    if (!std::isfinite(e.value)) throw DataError("non-finite rating");
    if (k > 0 && entries_[k - 1].user == e.user &&
        entries_[k - 1].item == e.item) {
      throw DataError("duplicate rating for (" + std::to_string(e.user) + "," +
                      std::to_string(e.item) + ")");
    }
  }
}

MaskedIndexSet RatingMatrix::mask() const {
  std::vector<Index2> pos;
  pos.reserve(entries_.size());
  for (const Rating& e : entries_) pos.push_back({e.user, e.item});
  return MaskedIndexSet(users_, items_, std::move(pos));
}

std::vector<double> RatingMatrix::values() const {
  std::vector<double> v;
  v.reserve(entries_.size());
  for (const Rating& e : entries_) v.push_back(e.value);
  return v;
}

void RatingMatrix::set_ids(std::vector<std::string> user_ids,
                           std::vector<std::string> item_ids) {
  if ((!user_ids.empty() && user_ids.size() != users_) ||
      (!item_ids.empty() && item_ids.size() != items_)) {
    throw DataError("id table size does not match matrix dimensions");
  }
  user_ids_ = std::move(user_ids);
  item_ids_ = std::move(item_ids);
}

std::string RatingMatrix::user_id(std::size_t u) const {
  return user_ids_.empty() ? std::to_string(u) : user_ids_.at(u);
}

std::string RatingMatrix::item_id(std::size_t i) const {
  return item_ids_.empty() ? std::to_string(i) : item_ids_.at(i);
}

std::vector<RawRating> read_raw_ratings(std::istream& in,
                                        const std::string& source) {
  std::vector<RawRating> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;

    std::string_view fields[3];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      const std::string_view f = text.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start);
      if (count == 3) throw ParseError(source, line_no, "expected 3 fields");
      fields[count++] = Trim(f);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != 3) throw ParseError(source, line_no, "expected 3 fields");
    if (fields[0].empty() || fields[1].empty()) {
      throw ParseError(source, line_no, "empty user or item id");
    }
    double value = 0.0;
    const std::string_view r = fields[2];
    const auto [ptr, ec] = std::from_chars(r.data(), r.data() + r.size(), value);
    if (ec != std::errc() || ptr != r.data() + r.size() || !std::isfinite(value)) {
      throw ParseError(source, line_no,
                       "invalid rating '" + std::string(r) + "'");
    }
    out.push_back({std::string(fields[0]), std::string(fields[1]), value, line_no});
  }
  return out;
}

RatingMatrix index_ratings(const std::vector<RawRating>& raw,
                           const std::string& source) {
  IdColumn users = IndexIds(raw, &RawRating::user);
  IdColumn items = IndexIds(raw, &RawRating::item);

  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (users.index[a] != users.index[b]) return users.index[a] < users.index[b];
    if (items.index[a] != items.index[b]) return items.index[a] < items.index[b];
    return a < b;
  });
  std::vector<Rating> entries;
  entries.reserve(raw.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t idx = order[k];
    if (k > 0 && users.index[order[k - 1]] == users.index[idx] &&
        items.index[order[k - 1]] == items.index[idx]) {
      throw DataError(source + ":" + std::to_string(raw[idx].line) +
                      ": duplicate rating for (" + raw[idx].user + "," +
                      raw[idx].item + "), first seen on line " +
                      std::to_string(raw[order[k - 1]].line));
    }
    entries.push_back({users.index[idx], items.index[idx], raw[idx].value});
  }
  RatingMatrix out(users.names.size(), items.names.size(), std::move(entries));
  out.set_ids(std::move(users.names), std::move(items.names));
  return out;
}

RatingMatrix parse_ratings(std::istream& in, const std::string& source) {
  return index_ratings(read_raw_ratings(in, source), source);
}

RatingMatrix load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rating file " + path.string());
  return parse_ratings(in, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_ratings(std::ostream& out, const RatingMatrix& ratings) {
  for (const Rating& e : ratings.entries()) {
    out << ratings.user_id(e.user) << ',' << ratings.item_id(e.item) << ','
        << format_double(e.value) << '\n';
  }
}

void save_ratings(const RatingMatrix& ratings,
                  const std::filesystem::path& path) {
  std::ostringstream out;
  write_ratings(out, ratings);
  write_file_atomic(path, out.str());
}

SyntheticData synth_low_rank(const SyntheticSpec& spec) {
  const std::size_t m = spec.users, n = spec.items, r = spec.rank;
  if (m == 0 || n == 0) throw ConfigError("synthetic data needs users, items > 0");
  if (r == 0 || r > std::min(m, n)) {
    throw ConfigError("synthetic rank must be in [1, min(users, items)]");
  }
  if (!(spec.observe_fraction > 0.0 && spec.observe_fraction <= 1.0)) {
    throw ConfigError("observe_fraction must be in (0, 1]");
  }
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
    throw ConfigError("noise_sd must be a finite value >= 0");
  }

  std::mt19937_64 factor_rng = MakeRng(spec.seed, Stream::kSyntheticFactors);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dense a(m, r), b(r, n);
  for (double& v : a.values()) v = normal(factor_rng);
  for (double& v : b.values()) v = normal(factor_rng);
  Dense truth = matmul(a, b);

  const std::size_t cells = m * n;
  const auto count = static_cast<std::size_t>(
      std::llround(spec.observe_fraction * static_cast<double>(cells)));
  std::vector<std::size_t> cell(cells);
  std::iota(cell.begin(), cell.end(), 0);
  std::mt19937_64 mask_rng = MakeRng(spec.seed, Stream::kSyntheticMask);
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  for (std::size_t k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, cells - 1);
    std::swap(cell[k], cell[pick(mask_rng)]);
  }
  cell.resize(count);
  std::sort(cell.begin(), cell.end());

  std::mt19937_64 noise_rng = MakeRng(spec.seed, Stream::kSyntheticNoise);
  std::vector<Rating> entries;
  entries.reserve(count);
  for (std::size_t c : cell) {
    const auto u = static_cast<std::uint32_t>(c / n);
    const auto i = static_cast<std::uint32_t>(c % n);
    double value = truth(u, i);
    if (spec.noise_sd > 0.0) value += spec.noise_sd * normal(noise_rng);
    entries.push_back({u, i, value});
  }
  return {RatingMatrix(m, n, std::move(entries)), std::move(truth)};
}

SplitDataset split(const RatingMatrix& ratings, double fraction,
                   std::uint64_t seed, bool per_user) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must be in (0, 1)");
  }
  if (ratings.size() < 2) throw DataError("cannot split fewer than 2 ratings");

  const auto& entries = ratings.entries();
  std::mt19937_64 rng = MakeRng(seed, Stream::kSplit);
  std::vector<bool> to_train(entries.size(), false);

  const auto assign = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < n_train; ++k) to_train[idx[k]] = true;
  };
  if (per_user) {
    std::size_t begin = 0;
    while (begin < entries.size()) {
      std::size_t end = begin;
      while (end < entries.size() && entries[end].user == entries[begin].user) ++end;
      assign(begin, end);
      begin = end;
    }
  } else {
    assign(0, entries.size());
  }

  std::vector<Rating> train, test;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    (to_train[k] ? train : test).push_back(entries[k]);
  }
  SplitDataset out{RatingMatrix(ratings.users(), ratings.items(), std::move(train)),
                   RatingMatrix(ratings.users(), ratings.items(), std::move(test)),
                   seed};
  out.train.set_ids(ratings.user_ids(), ratings.item_ids());
  out.test.set_ids(ratings.user_ids(), ratings.item_ids());
  return out;
}

std::pair<std::size_t, std::size_t> column_range(std::size_t items,
                                                 std::size_t agents,
                                                 std::size_t agent) {
  const std::size_t base = items / agents;
  const std::size_t extra = items % agents;
  const std::size_t start = agent * base + std::min(agent, extra);
  return {start, start + base + (agent < extra ? 1 : 0)};
}

RatingMatrix restrict_columns(const RatingMatrix& ratings, std::size_t col_start,
                              std::size_t col_end) {
  std::vector<Rating> local;
  for (const Rating& e : ratings.entries()) {
    if (e.item >= col_start && e.item < col_end) {
      local.push_back({e.user, static_cast<std::uint32_t>(e.item - col_start),
                       e.value});
    }
  }
  RatingMatrix out(ratings.users(), col_end - col_start, std::move(local));
  std::vector<std::string> item_ids;
  if (!ratings.item_ids().empty()) {
    item_ids.assign(ratings.item_ids().begin() + col_start,
                    ratings.item_ids().begin() + col_end);
  }
  out.set_ids(ratings.user_ids(), std::move(item_ids));
  return out;
}

std::vector<Shard> partition_columns(const RatingMatrix& ratings,
                                     std::size_t agents) {
  if (agents == 0 || agents > ratings.items()) {
    throw ConfigError("agent count " + std::to_string(agents) +
                      " must be in [1, items=" + std::to_string(ratings.items()) +
                      "]");
  }
  std::vector<Shard> shards;
  shards.reserve(agents);
  for (std::size_t a = 0; a < agents; ++a) {
    const auto [start, end] = column_range(ratings.items(), agents, a);
    shards.push_back({a, start, end, restrict_columns(ratings, start, end)});
  }
  return shards;
}

}  // namespace dmc
