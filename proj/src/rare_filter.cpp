// Copyright 2026 The tailsel Authors
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

#include "tailsel/rare_filter.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

#include "tailsel/util.hpp"

namespace tailsel {

UnigramTable::UnigramTable(std::unordered_map<std::string, std::uint64_t> freq)
    : freq_(std::move(freq)) {
  for (const auto& [token, count] : freq_) total_tokens_ += count;
}

std::uint64_t UnigramTable::Frequency(std::string_view token) const {
  auto it = freq_.find(std::string(token));
  return it == freq_.end() ? 0 : it->second;
}

FrequencyHistogram UnigramTable::Histogram() const {
  std::vector<std::uint64_t> counts;
  counts.reserve(freq_.size());
  for (const auto& [token, count] : freq_) counts.push_back(count);
  return BuildHistogramFromCounts(counts);
}

UnigramTable BuildUnigramTable(const Corpus& acoustic) {
  if (acoustic.empty()) throw Error("unigram table: empty corpus");
  const auto& records = acoustic.records();
  const int num_shards = std::max(1, MaxThreads());
  std::vector<std::unordered_map<std::string, std::uint64_t>> shards(
      num_shards);
#pragma omp parallel num_threads(num_shards)
  {
    auto& local = shards[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < records.size(); ++i) {
      for (const auto& token : Tokenize(records[i].text)) {
        local[token] += records[i].count;
      }
    }
  }
  std::unordered_map<std::string, std::uint64_t> merged;
  for (auto& shard : shards) {
    for (auto& [token, count] : shard) merged[token] += count;
  }
  return UnigramTable(std::move(merged));
}

Corpus FilterRare(const Corpus& corpus, const UnigramTable& table,
                  std::uint64_t threshold, RareFilterReport* report) {
  const auto& records = corpus.records();
  std::vector<char> keep(records.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& token : Tokenize(records[i].text)) {
      if (table.Frequency(token) < threshold) {
        keep[i] = 1;
        break;
      }
    }
  }
  std::vector<SentenceRecord> kept;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) kept.push_back(records[i]);
  }
  if (report != nullptr) {
    report->input_records = records.size();
    report->kept_records = kept.size();
    report->kept_fraction =
        records.empty() ? 0.0
                        : static_cast<double>(kept.size()) /
                              static_cast<double>(records.size());
  }
  return Corpus::FromRecords(std::move(kept));
}

}  // namespace tailsel
