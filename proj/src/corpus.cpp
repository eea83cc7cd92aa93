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

#include "tailsel/corpus.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <charconv>
#include <unordered_set>

#include "tailsel/rng.hpp"
#include "tailsel/util.hpp"

namespace tailsel {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

void AddCount(std::uint64_t* acc, std::uint64_t value) {
  if (__builtin_add_overflow(*acc, value, acc)) {
    throw Error("count overflow while aggregating");
  }
}

void SortCanonical(std::vector<SentenceRecord>* records) {
  std::sort(records->begin(), records->end(),
            [](const SentenceRecord& a, const SentenceRecord& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.text < b.text;
            });
}

}  // namespace

Corpus Corpus::FromRecords(std::vector<SentenceRecord> records) {
  std::unordered_map<std::string, std::uint64_t> merged;
  merged.reserve(records.size());
  for (auto& r : records) {
    if (r.count == 0) continue;
    AddCount(&merged[std::move(r.text)], r.count);
  }
  return FromCountMap(merged);
}

Corpus Corpus::FromCountMap(
    const std::unordered_map<std::string, std::uint64_t>& counts) {
  Corpus corpus;
  corpus.records_.reserve(counts.size());
  for (const auto& [text, count] : counts) {
    if (count == 0) continue;
    corpus.records_.push_back({text, count});
    AddCount(&corpus.total_count_, count);
  }
  SortCanonical(&corpus.records_);
  return corpus;
}

std::string Normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> Tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < normalized.size()) {
    std::size_t end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    tokens.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

namespace {

struct ParsedLine {
  std::string text;
  std::uint64_t count = 0;
};

// Parses one line of the given format.  Returns false with `error` set on
// malformed input; empty-after-normalization texts yield count 0 and are
// dropped by the caller.
bool ParseLine(const std::string& line, CorpusFormat format, ParsedLine* out,
               std::string* error) {
  if (format == CorpusFormat::kRawLines) {
    out->text = Normalize(line);
    out->count = 1;
    return true;
  }
  std::size_t tab = line.find('\t');
  if (tab == std::string::npos) {
    *error = "missing tab separator";
    return false;
  }
  std::uint64_t count = 0;
  const char* first = line.data();
  const char* last = line.data() + tab;
  auto [ptr, ec] = std::from_chars(first, last, count);
  if (ec == std::errc::result_out_of_range) {
    *error = "count overflow";
    return false;
  }
  if (ec != std::errc() || ptr != last || count == 0) {
    *error = "malformed count";
    return false;
  }
  out->text = Normalize(std::string_view(line).substr(tab + 1));
  out->count = count;
  return true;
}

}  // namespace

Corpus AggregateLines(const std::vector<std::string>& lines,
                      CorpusFormat format) {
  const std::size_t n = lines.size();
  const int num_shards = std::max(1, MaxThreads());
  std::vector<std::unordered_map<std::string, std::uint64_t>> shards(
      num_shards);
  // first malformed line wins, independent of shard scheduling
  std::size_t error_line = n + 1;
  std::string error_msg;

#pragma omp parallel num_threads(num_shards)
  {
    const int shard = omp_get_thread_num();
    auto& local = shards[shard];
    std::size_t local_error_line = n + 1;
    std::string local_error;
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      if (format == CorpusFormat::kRawLines && lines[i].empty()) continue;
      ParsedLine parsed;
      std::string err;
      if (!ParseLine(lines[i], format, &parsed, &err)) {
        if (i + 1 < local_error_line) {
          local_error_line = i + 1;
          local_error = err;
        }
        continue;
      }
      if (parsed.text.empty()) continue;
      local[parsed.text] += parsed.count;  // overflow checked at merge
    }
#pragma omp critical
    if (local_error_line < error_line) {
      error_line = local_error_line;
      error_msg = local_error;
    }
  }

  if (error_line <= n) {
    throw Error("line " + std::to_string(error_line) + ": " + error_msg);
  }

  std::unordered_map<std::string, std::uint64_t> merged;
  for (auto& shard : shards) {
    for (auto& [text, count] : shard) AddCount(&merged[text], count);
  }
  return Corpus::FromCountMap(merged);
}

Corpus ReadAggregate(const std::string& path, CorpusFormat format) {
  return AggregateLines(ReadLines(path), format);
}

std::string FormatCorpus(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records()) {
    out += std::to_string(r.count);
    out += '\t';
    out += r.text;
    out += '\n';
  }
  return out;
}

void WriteCorpus(const Corpus& corpus, const std::string& path) {
  WriteFile(path, FormatCorpus(corpus));
}

namespace {

// Zipf-like rank draw: P(rank r) ∝ log(1 + 1/(r+1)), realized by inverting
// a log-uniform variable.  Rank 0 is the most likely.
std::uint64_t DrawRank(double u, std::uint64_t vocab_size) {
  double v = std::exp(u * std::log(static_cast<double>(vocab_size)));
  auto rank = static_cast<std::uint64_t>(v) - 1;
  return std::min(rank, vocab_size - 1);
}

class SentenceSampler {
 public:
  explicit SentenceSampler(const ZipfGenSpec& spec)
      : spec_(spec),
        rotation_(static_cast<std::uint64_t>(std::llround(
                      spec.domain_profile *
                      static_cast<double>(spec.vocab_size))) %
                  spec.vocab_size) {}

  // Candidate text for bin f, slot j, retry attempt a.
  std::string Candidate(std::uint64_t f, std::uint64_t j,
                        std::uint64_t attempt) const {
    const std::uint64_t sentence_key = CounterRng::Draw(spec_.seed, f, j)[0];
    const std::uint64_t len =
        1 + CounterRng::Draw(sentence_key, attempt, 0)[0] % spec_.max_len;
    std::string text;
    std::array<std::uint64_t, 2> pair{};
    for (std::uint64_t i = 0; i < len; ++i) {
      if (i % 2 == 0) pair = CounterRng::Draw(sentence_key, attempt, 1 + i / 2);
      const std::uint64_t rank = DrawRank(ToUnit(pair[i % 2]), spec_.vocab_size);
      if (i > 0) text.push_back(' ');
      text += "w" + std::to_string((rank + rotation_) % spec_.vocab_size);
    }
    return text;
  }

 private:
  const ZipfGenSpec& spec_;
  std::uint64_t rotation_;
};

}  // namespace

Corpus GenZipf(const ZipfGenSpec& spec) {
  if (spec.alpha <= 0) throw Error("gen-zipf: alpha must be > 0");
  if (spec.amplitude < 1) throw Error("gen-zipf: amplitude must be >= 1");
  if (spec.f_max < 1) throw Error("gen-zipf: f_max must be >= 1");
  if (spec.vocab_size < 2) throw Error("gen-zipf: vocab_size must be >= 2");
  if (spec.max_len < 1) throw Error("gen-zipf: max_len must be >= 1");

  // Exact histogram construction: bins[f] = round(A * f^-alpha), plus
  // head-boost injections.  Bins that round to 0 are simply empty.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> bins;
  for (std::uint64_t f = 1; f <= spec.f_max; ++f) {
    double expected =
        spec.amplitude * std::pow(static_cast<double>(f), -spec.alpha);
    auto distinct = static_cast<std::uint64_t>(std::llround(expected));
    if (distinct > 0) bins.emplace_back(f, distinct);
  }
  for (const auto& boost : spec.head_boost) {
    if (boost.extra_distinct == 0) continue;
    bool merged = false;
    for (auto& [f, distinct] : bins) {
      if (f == boost.frequency) {
        distinct += boost.extra_distinct;
        merged = true;
        break;
      }
    }
    if (!merged) bins.emplace_back(boost.frequency, boost.extra_distinct);
  }
  std::sort(bins.begin(), bins.end());

  SentenceSampler sampler(spec);

  // First-attempt candidates are independent, so they parallelize; the
  // dedup pass below walks bins in a fixed order, which keeps the retry
  // sequence (and therefore the output) independent of thread count.
  std::vector<std::vector<std::string>> candidates(bins.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const auto [f, distinct] = bins[b];
    candidates[b].resize(distinct);
    for (std::uint64_t j = 0; j < distinct; ++j) {
      candidates[b][j] = sampler.Candidate(f, j, 0);
    }
  }

  std::unordered_set<std::string> seen;
  std::vector<SentenceRecord> records;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const auto [f, distinct] = bins[b];
    for (std::uint64_t j = 0; j < distinct; ++j) {
      std::string text = std::move(candidates[b][j]);
      std::uint64_t attempt = 0;
      while (!seen.insert(text).second) {
        if (++attempt > 1000) {
          throw Error(
              "gen-zipf: vocabulary space too small to produce distinct "
              "sentences");
        }
        text = sampler.Candidate(f, j, attempt);
      }
      records.push_back({std::move(text), f});
    }
  }
  return Corpus::FromRecords(std::move(records));
}

}  // namespace tailsel
