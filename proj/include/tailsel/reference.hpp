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

#ifndef TAILSEL_REFERENCE_HPP_
#define TAILSEL_REFERENCE_HPP_

#include "tailsel/contrastive.hpp"
#include "tailsel/corpus.hpp"
#include "tailsel/downsample.hpp"
#include "tailsel/mixer.hpp"
#include "tailsel/ngram.hpp"
#include "tailsel/rare_filter.hpp"
#include "tailsel/stats.hpp"

// Single-threaded reference implementations of the parallel kernels.
// They share the per-item primitives (normalization, hashing, scoring
// formulas) with the parallel versions but do all aggregation in one
// plain loop.  Tests assert that the OpenMP kernels reproduce these
// results exactly; the bench target compares their throughput.

namespace tailsel::reference {

Corpus AggregateLines(const std::vector<std::string>& lines,
                      CorpusFormat format);
FrequencyHistogram BuildHistogram(const Corpus& corpus);
Corpus DownsampleCorpus(const Corpus& corpus, const DownsampleSpec& spec,
                        const PowerLawFit* fit = nullptr,
                        DownsampleReport* report = nullptr);
UnigramTable BuildUnigramTable(const Corpus& acoustic);
Corpus FilterRare(const Corpus& corpus, const UnigramTable& table,
                  std::uint64_t threshold);
NGramModel TrainNGram(const Corpus& corpus, int order, double discount);
std::vector<ScoredRecord> ScoreCorpus(const Corpus& corpus,
                                      const LanguageModel& target,
                                      const LanguageModel& background);
double CorpusPerplexity(const LanguageModel& model, const Corpus& corpus);
std::vector<MixBatch> MixStream(const std::array<const Corpus*, 4>& sources,
                                const MixSpec& spec);

}  // namespace tailsel::reference

#endif  // TAILSEL_REFERENCE_HPP_
