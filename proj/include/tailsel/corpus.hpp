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

#ifndef TAILSEL_CORPUS_HPP_
#define TAILSEL_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tailsel {

// A distinct normalized sentence with its occurrence count.
struct SentenceRecord {
  std::string text;
  std::uint64_t count = 0;

  bool operator==(const SentenceRecord&) const = default;
};

// An aggregated corpus: unique texts, each with count >= 1.  Records are
// kept in canonical order (count descending, text ascending), which is
// also the on-disk order, so equal corpora serialize to equal bytes.
class Corpus {
 public:
  Corpus() = default;

  // Merges duplicate texts by summing counts, drops zero-count records,
  // and sorts canonically.  Throws Error on count overflow.
  static Corpus FromRecords(std::vector<SentenceRecord> records);
  static Corpus FromCountMap(
      const std::unordered_map<std::string, std::uint64_t>& counts);

  const std::vector<SentenceRecord>& records() const { return records_; }
  std::uint64_t total_count() const { return total_count_; }
  std::size_t distinct_count() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<SentenceRecord> records_;
  std::uint64_t total_count_ = 0;
};

// Lowercases (ASCII), trims, and collapses internal whitespace runs to
// single spaces.  May return an empty string; callers drop those.
std::string Normalize(std::string_view raw);

// Splits a normalized sentence on single spaces.  Joining the result with
// single spaces reproduces the input.
std::vector<std::string> Tokenize(std::string_view normalized);

enum class CorpusFormat { kRawLines, kAggregatedTsv };

// Reads and aggregates a corpus file.  raw-lines: one sentence per line,
// each contributing count 1.  aggregated-tsv: "count<TAB>text" lines.
// Texts are normalized before merging; the result is independent of input
// line order.  Malformed TSV lines are reported with their line number.
Corpus ReadAggregate(const std::string& path, CorpusFormat format);
Corpus AggregateLines(const std::vector<std::string>& lines,
                      CorpusFormat format);

// Serializes as aggregated-tsv in canonical order.
std::string FormatCorpus(const Corpus& corpus);
void WriteCorpus(const Corpus& corpus, const std::string& path);

// One injected head bin: `extra_distinct` additional distinct sentences,
// each with count `frequency`.
struct HeadBoost {
  std::uint64_t frequency = 1;
  std::uint64_t extra_distinct = 0;
};

// Recipe for a synthetic corpus whose frequency histogram is exactly
// round(amplitude * f^-alpha) for f = 1..f_max plus head-boost bins.
struct ZipfGenSpec {
  double amplitude = 1.0;      // distinct sentences at f = 1
  double alpha = 1.0;          // power-law exponent
  std::uint64_t f_max = 1;     // highest generated frequency
  std::uint64_t vocab_size = 2;
  std::uint64_t max_len = 1;   // max tokens per sentence
  std::vector<HeadBoost> head_boost;
  double domain_profile = 0.0;  // rotates which tokens carry the head mass
  std::uint64_t seed = 0;
};

// Deterministic function of the spec; sentence texts are unique.
Corpus GenZipf(const ZipfGenSpec& spec);

}  // namespace tailsel

#endif  // TAILSEL_CORPUS_HPP_
