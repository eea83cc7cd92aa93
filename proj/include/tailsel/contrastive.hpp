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

#ifndef TAILSEL_CONTRASTIVE_HPP_
#define TAILSEL_CONTRASTIVE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tailsel/corpus.hpp"
#include "tailsel/ngram.hpp"

namespace tailsel {

// Per-sentence domain-match score: log perplexity under the target LM
// minus log perplexity under the background LM.  Lower means more like
// the target domain.
struct ContrastiveScore {
  std::string text;
  double score = 0.0;
};

struct ScoredRecord {
  std::string text;
  std::uint64_t count = 0;
  double score = 0.0;
};

ContrastiveScore ScoreSentence(std::string_view sentence,
                               const LanguageModel& target,
                               const LanguageModel& background);

// Scores every distinct record; output order matches corpus.records().
std::vector<ScoredRecord> ScoreCorpus(const Corpus& corpus,
                                      const LanguageModel& target,
                                      const LanguageModel& background);

// Nearest-rank percentile selection over scores sorted ascending: the
// threshold is the score at rank ceil(q/100 * N) (1-based), and every
// record with score <= threshold is kept, ties included.  In weighted
// mode ranks run over occurrence mass instead of distinct records.
// Returns indices into `scored`.
std::vector<std::size_t> SelectByPercentile(
    const std::vector<ScoredRecord>& scored, double keep_percentile,
    bool weighted);

struct ContrastiveReport {
  double threshold = 0.0;
  std::size_t kept_records = 0;
};

Corpus SelectContrastive(const Corpus& corpus, const LanguageModel& target,
                         const LanguageModel& background,
                         double keep_percentile, bool weighted = false,
                         std::vector<ScoredRecord>* scores_out = nullptr,
                         ContrastiveReport* report = nullptr);

// "score<TAB>count<TAB>text" lines sorted ascending by (score, text).
std::string FormatScoresTsv(std::vector<ScoredRecord> scored);

}  // namespace tailsel

#endif  // TAILSEL_CONTRASTIVE_HPP_
