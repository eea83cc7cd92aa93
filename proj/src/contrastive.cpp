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

#include "tailsel/contrastive.hpp"

#include <algorithm>
#include <cmath>

#include "tailsel/util.hpp"

namespace tailsel {

ContrastiveScore ScoreSentence(std::string_view sentence,
                               const LanguageModel& target,
                               const LanguageModel& background) {
  if (target.order() != background.order()) {
    throw Error("contrastive: target and background LM order mismatch");
  }
  ContrastiveScore result;
  result.text = Normalize(sentence);
  result.score =
      LogPerplexity(target, result.text) - LogPerplexity(background, result.text);
  return result;
}

std::vector<ScoredRecord> ScoreCorpus(const Corpus& corpus,
                                      const LanguageModel& target,
                                      const LanguageModel& background) {
  if (target.order() != background.order()) {
    throw Error("contrastive: target and background LM order mismatch");
  }
  const auto& records = corpus.records();
  std::vector<ScoredRecord> scored(records.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < records.size(); ++i) {
    scored[i].text = records[i].text;
    scored[i].count = records[i].count;
    scored[i].score = LogPerplexity(target, records[i].text) -
                      LogPerplexity(background, records[i].text);
  }
  return scored;
}

std::vector<std::size_t> SelectByPercentile(
    const std::vector<ScoredRecord>& scored, double keep_percentile,
    bool weighted) {
  if (!(keep_percentile > 0 && keep_percentile <= 100)) {
    throw Error("contrastive: keep percentile must be in (0,100]");
  }
  if (scored.empty()) throw Error("contrastive: empty corpus");

  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scored[a].score != scored[b].score)
      return scored[a].score < scored[b].score;
    return scored[a].text < scored[b].text;
  });

  double threshold;
  if (!weighted) {
    auto rank = static_cast<std::size_t>(std::ceil(
        keep_percentile * static_cast<double>(scored.size()) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, scored.size());
    threshold = scored[order[rank - 1]].score;
  } else {
    std::uint64_t total = 0;
    for (const auto& r : scored) total += r.count;
    const auto target_mass = static_cast<std::uint64_t>(std::ceil(
        keep_percentile * static_cast<double>(total) / 100.0));
    std::uint64_t cumulative = 0;
    threshold = scored[order.back()].score;
    for (std::size_t i : order) {
      cumulative += scored[i].count;
      if (cumulative >= target_mass) {
        threshold = scored[i].score;
        break;
      }
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].score <= threshold) kept.push_back(i);
  }
  return kept;
}

Corpus SelectContrastive(const Corpus& corpus, const LanguageModel& target,
                         const LanguageModel& background,
                         double keep_percentile, bool weighted,
                         std::vector<ScoredRecord>* scores_out,
                         ContrastiveReport* report) {
  auto scored = ScoreCorpus(corpus, target, background);
  auto kept = SelectByPercentile(scored, keep_percentile, weighted);

  std::vector<SentenceRecord> records;
  records.reserve(kept.size());
  for (std::size_t i : kept) {
    records.push_back({scored[i].text, scored[i].count});
  }
  if (report != nullptr) {
    report->kept_records = kept.size();
    report->threshold =
        kept.empty() ? 0.0 : scored[kept.back()].score;
    for (std::size_t i : kept) {
      report->threshold = std::max(report->threshold, scored[i].score);
    }
  }
  if (scores_out != nullptr) *scores_out = std::move(scored);
  return Corpus::FromRecords(std::move(records));
}

std::string FormatScoresTsv(std::vector<ScoredRecord> scored) {
  std::sort(scored.begin(), scored.end(),
            [](const ScoredRecord& a, const ScoredRecord& b) {
              if (a.score != b.score) return a.score < b.score;
              return a.text < b.text;
            });
  std::string out;
  for (const auto& r : scored) {
    out += FormatDouble(r.score);
    out += '\t';
    out += std::to_string(r.count);
    out += '\t';
    out += r.text;
    out += '\n';
  }
  return out;
}

}  // namespace tailsel
