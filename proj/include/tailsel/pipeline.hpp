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

#ifndef TAILSEL_PIPELINE_HPP_
#define TAILSEL_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tailsel/contrastive.hpp"
#include "tailsel/corpus.hpp"
#include "tailsel/downsample.hpp"
#include "tailsel/mixer.hpp"
#include "tailsel/ngram.hpp"
#include "tailsel/rare_filter.hpp"
#include "tailsel/stats.hpp"

namespace tailsel {

struct ContrastiveConfig {
  int order = 3;
  double discount = 0.75;
  double lambda = 0.5;  // acoustic weight in the target-LM interpolation
  double keep_percentile = 6.0;
  bool weighted = false;
};

struct EvalConfig {
  std::string target_testset_path;
  std::string tail_testset_path;
  int lm_order = 3;
  double lm_discount = 0.75;
  std::uint64_t token_budget = 0;
};

// Full pipeline wiring: downsample first, then rare-unigram filtering and
// contrastive selection from the downsampled corpus, then minibatch
// mixing and the evaluation report.
struct PipelineConfig {
  std::string text_corpus_path;
  std::string acoustic_corpus_path;
  DownsampleSpec downsample;
  std::uint64_t rare_threshold = 15;
  ContrastiveConfig contrastive;
  MixSpec mix;
  EvalConfig eval;
  std::string output_dir;
  std::uint64_t seed = 0;
};

// Strict JSON parsing: unknown fields are rejected at every level, so a
// typo in an experiment sweep fails loudly instead of silently running
// defaults.
PipelineConfig ParsePipelineConfig(const std::string& json_text);
PipelineConfig LoadPipelineConfig(const std::string& path);

struct EvalRow {
  std::string label;
  std::uint64_t total = 0;
  std::uint64_t distinct = 0;
  double logppl_target = 0.0;
  double logppl_tail = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

// Trains an equal-capacity LM per selection — an occurrence-weighted
// sample capped at the same token budget for every row — then reports
// count-weighted log perplexity on the two testsets.
EvalReport RunEvalReport(
    const std::vector<std::pair<std::string, const Corpus*>>& selections,
    const EvalConfig& cfg, const Corpus& target_testset,
    const Corpus& tail_testset, std::uint64_t seed);

std::string FormatEvalReportTsv(const EvalReport& report);

// Occurrence-weighted sample of a corpus, drawn with replacement until the
// token budget is reached (deterministic in seed).
Corpus SampleTokenBudget(const Corpus& corpus, std::uint64_t token_budget,
                         std::uint64_t seed);

struct PipelineResult {
  PowerLawFit fit;
  DownsampleReport downsample_report;
  RareFilterReport rare_report;
  ContrastiveReport contrastive_report;
  EvalReport eval_report;
  std::string manifest_json;
};

// Runs every stage, writing all intermediate corpora, the fit line, score
// file, mix stream, report.tsv, and manifest.json under output_dir.
// A stage failure aborts with the stage name; files still being written
// keep their ".partial" suffix.
PipelineResult RunPipeline(const PipelineConfig& config);

}  // namespace tailsel

#endif  // TAILSEL_PIPELINE_HPP_
