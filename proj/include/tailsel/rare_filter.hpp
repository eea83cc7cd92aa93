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

#ifndef TAILSEL_RARE_FILTER_HPP_
#define TAILSEL_RARE_FILTER_HPP_

#include <cstdint>
#include <string_view>
#include <unordered_map>

#include "tailsel/corpus.hpp"
#include "tailsel/stats.hpp"

namespace tailsel {

// Count-weighted unigram frequencies of the acoustic transcripts.  Absent
// tokens have frequency 0, which makes them maximally rare.
class UnigramTable {
 public:
  UnigramTable() = default;
  explicit UnigramTable(std::unordered_map<std::string, std::uint64_t> freq);

  std::uint64_t Frequency(std::string_view token) const;
  std::uint64_t total_tokens() const { return total_tokens_; }
  std::size_t distinct_tokens() const { return freq_.size(); }

  FrequencyHistogram Histogram() const;

 private:
  std::unordered_map<std::string, std::uint64_t> freq_;
  std::uint64_t total_tokens_ = 0;
};

UnigramTable BuildUnigramTable(const Corpus& acoustic);

struct RareFilterReport {
  std::size_t input_records = 0;
  std::size_t kept_records = 0;
  double kept_fraction = 0.0;
};

// Keeps exactly the records containing at least one token whose acoustic
// frequency is strictly below `threshold`; counts are unchanged.
Corpus FilterRare(const Corpus& corpus, const UnigramTable& table,
                  std::uint64_t threshold,
                  RareFilterReport* report = nullptr);

}  // namespace tailsel

#endif  // TAILSEL_RARE_FILTER_HPP_
