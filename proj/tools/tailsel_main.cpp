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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tailsel/contrastive.hpp"
#include "tailsel/corpus.hpp"
#include "tailsel/downsample.hpp"
#include "tailsel/mixer.hpp"
#include "tailsel/ngram.hpp"
#include "tailsel/pipeline.hpp"
#include "tailsel/rare_filter.hpp"
#include "tailsel/stats.hpp"
#include "tailsel/util.hpp"

namespace {

using namespace tailsel;

CorpusFormat ParseFormat(const std::string& name) {
  if (name == "raw") return CorpusFormat::kRawLines;
  if (name == "agg") return CorpusFormat::kAggregatedTsv;
  throw Error("unknown format: " + name + " (expected raw or agg)");
}

struct HeadBoostFlag {
  std::vector<std::string> raw;

  std::vector<HeadBoost> Parse() const {
    std::vector<HeadBoost> boosts;
    for (const auto& s : raw) {
      unsigned long long f = 0, k = 0;
      if (std::sscanf(s.c_str(), "%llu:%llu", &f, &k) != 2 || f == 0) {
        throw Error("bad --head-boost value (expected F:K): " + s);
      }
      boosts.push_back({f, k});
    }
    return boosts;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tailsel: LM training-data selection via frequency downsampling, "
      "rare-unigram filtering, and contrastive selection"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "max worker threads (default: OpenMP runtime)");

  // count
  std::string in_path, out_path, format = "raw";
  auto* count = app.add_subcommand("count", "aggregate a corpus file");
  count->add_option("--in", in_path)->required();
  count->add_option("--format", format, "raw|agg")->required();
  count->add_option("--out", out_path)->required();

  // gen-zipf
  ZipfGenSpec zipf;
  HeadBoostFlag boosts;
  auto* gen = app.add_subcommand("gen-zipf", "generate a synthetic corpus "
                                             "with an exact power-law "
                                             "frequency histogram");
  gen->add_option("--out", out_path)->required();
  gen->add_option("--amplitude", zipf.amplitude)->required();
  gen->add_option("--alpha", zipf.alpha)->required();
  gen->add_option("--fmax", zipf.f_max)->required();
  gen->add_option("--vocab", zipf.vocab_size)->required();
  gen->add_option("--max-len", zipf.max_len)->required();
  gen->add_option("--seed", zipf.seed)->required();
  gen->add_option("--head-boost", boosts.raw, "F:K, repeatable");
  gen->add_option("--domain-profile", zipf.domain_profile);

  // hist
  auto* hist_cmd = app.add_subcommand("hist", "frequency histogram of an "
                                              "aggregated corpus");
  hist_cmd->add_option("--in", in_path)->required();
  hist_cmd->add_option("--out", out_path)->required();

  // fit
  std::string hist_path, fmax_str = "auto";
  std::uint64_t fmin = 1;
  auto* fit_cmd = app.add_subcommand("fit", "power-law fit of a histogram");
  fit_cmd->add_option("--hist", hist_path)->required();
  fit_cmd->add_option("--fmin", fmin);
  fit_cmd->add_option("--fmax", fmax_str, "N or auto");

  // downsample
  std::string fn_name, fit_path;
  std::optional<double> beta, fc, param;
  std::uint64_t seed = 0;
  auto* ds = app.add_subcommand("downsample", "downsample record counts");
  ds->add_option("--in", in_path)->required();
  ds->add_option("--out", out_path)->required();
  ds->add_option("--fn", fn_name, "simple-power|soft-log|pure-log|dedup|none")
      ->required();
  ds->add_option("--beta", beta);
  ds->add_option("--fc", fc);
  ds->add_option("--param", param, "convention parameter, needs --fit");
  ds->add_option("--fit", fit_path, "file holding one `fit` output line");
  ds->add_option("--seed", seed);

  // lm-train
  int order = 3;
  double discount = 0.75;
  std::string model_path;
  auto* lm_train = app.add_subcommand("lm-train", "train an n-gram LM");
  lm_train->add_option("--in", in_path)->required();
  lm_train->add_option("--order", order)->required();
  lm_train->add_option("--discount", discount)->required();
  lm_train->add_option("--out", model_path)->required();

  // ppl
  std::string lm_path, lm2_path;
  double lambda = 0.5;
  auto* ppl = app.add_subcommand("ppl", "count-weighted mean log perplexity "
                                        "of a corpus");
  ppl->add_option("--lm", lm_path)->required();
  auto* lm2_opt = ppl->add_option("--lm2", lm2_path,
                                  "second model, mixed in with weight "
                                  "--lambda");
  ppl->add_option("--lambda", lambda)->needs(lm2_opt);
  ppl->add_option("--in", in_path)->required();

  // rare-filter
  std::string acoustic_path;
  std::uint64_t threshold = 15;
  auto* rare = app.add_subcommand("rare-filter", "keep sentences containing "
                                                 "an acoustically rare "
                                                 "unigram");
  rare->add_option("--in", in_path)->required();
  rare->add_option("--acoustic", acoustic_path)->required();
  rare->add_option("--threshold", threshold);
  rare->add_option("--out", out_path)->required();

  // contrastive
  std::string target_lm_path, background_lm_path, scores_path;
  double keep_percentile = 6.0;
  bool weighted = false;
  std::optional<double> contr_lambda;
  auto* contr = app.add_subcommand("contrastive", "keep the lowest-scoring "
                                                  "percentile of "
                                                  "target-minus-background "
                                                  "log perplexity");
  contr->add_option("--in", in_path)->required();
  contr->add_option("--target-lm", target_lm_path)->required();
  contr->add_option("--background-lm", background_lm_path)->required();
  contr->add_option("--lambda", contr_lambda,
                    "interpolate target = lambda*target + "
                    "(1-lambda)*background");
  contr->add_option("--keep-percentile", keep_percentile);
  contr->add_flag("--weighted", weighted,
                  "percentile over occurrence mass instead of distinct "
                  "records");
  contr->add_option("--out", out_path)->required();
  contr->add_option("--scores-out", scores_path);

  // mix
  std::string d_path, a_path, r_path, c_path, ratios_str;
  MixSpec mix_spec;
  auto* mix = app.add_subcommand("mix", "emit minibatches sampled from the "
                                        "four sources");
  mix->add_option("--d", d_path);
  mix->add_option("--a", a_path);
  mix->add_option("--r", r_path);
  mix->add_option("--c", c_path);
  mix->add_option("--ratios", ratios_str, "D,A,R,C percentages, e.g. "
                                          "0,20,40,40")
      ->required();
  mix->add_option("--batch", mix_spec.batch_size)->required();
  mix->add_option("--batches", mix_spec.num_batches)->required();
  mix->add_option("--seed", mix_spec.seed);
  mix->add_option("--out", out_path)->required();

  // pipeline
  std::string config_path;
  auto* pipe = app.add_subcommand("pipeline", "run the full selection "
                                              "pipeline from a JSON config");
  pipe->add_option("--config", config_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    SetMaxThreads(threads);

    if (*count) {
      Corpus corpus = ReadAggregate(in_path, ParseFormat(format));
      WriteCorpus(corpus, out_path);
      std::cout << "records=" << corpus.distinct_count()
                << " total=" << corpus.total_count() << "\n";
    } else if (*gen) {
      zipf.head_boost = boosts.Parse();
      Corpus corpus = GenZipf(zipf);
      WriteCorpus(corpus, out_path);
      std::cout << "records=" << corpus.distinct_count()
                << " total=" << corpus.total_count() << "\n";
    } else if (*hist_cmd) {
      Corpus corpus = ReadAggregate(in_path, CorpusFormat::kAggregatedTsv);
      EmitHistogramTsv(BuildHistogram(corpus), out_path);
    } else if (*fit_cmd) {
      FrequencyHistogram hist = ReadHistogramTsv(hist_path);
      std::optional<std::uint64_t> fmax;
      if (fmax_str != "auto") fmax = std::stoull(fmax_str);
      std::cout << FormatFitLine(FitPowerLaw(hist, fmin, fmax)) << "\n";
    } else if (*ds) {
      DownsampleSpec spec;
      spec.function = ParseDownsampleFunction(fn_name);
      spec.beta = beta;
      spec.fc = fc;
      spec.paper_param = param;
      spec.seed = seed;
      std::optional<PowerLawFit> fit;
      if (!fit_path.empty()) {
        fit = ParseFitLine(ReadLines(fit_path).at(0));
      }
      Corpus corpus = ReadAggregate(in_path, CorpusFormat::kAggregatedTsv);
      DownsampleReport report;
      Corpus out =
          DownsampleCorpus(corpus, spec, fit ? &*fit : nullptr, &report);
      WriteCorpus(out, out_path);
      std::printf("input_total=%llu output_total=%llu reduction=%.4f\n",
                  static_cast<unsigned long long>(report.input_total),
                  static_cast<unsigned long long>(report.output_total),
                  report.reduction_factor);
    } else if (*lm_train) {
      Corpus corpus = ReadAggregate(in_path, CorpusFormat::kAggregatedTsv);
      NGramModel::Train(corpus, order, discount).Save(model_path);
    } else if (*ppl) {
      Corpus corpus = ReadAggregate(in_path, CorpusFormat::kAggregatedTsv);
      NGramModel lm = NGramModel::Load(lm_path);
      double value;
      if (!lm2_path.empty()) {
        NGramModel lm2 = NGramModel::Load(lm2_path);
        InterpolatedModel mixed(&lm, &lm2, lambda);
        value = CorpusPerplexity(mixed, corpus);
      } else {
        value = CorpusPerplexity(lm, corpus);
      }
      std::printf("%.6f\n", value);
    } else if (*rare) {
      Corpus corpus = ReadAggregate(in_path, CorpusFormat::kAggregatedTsv);
      Corpus acoustic =
          ReadAggregate(acoustic_path, CorpusFormat::kAggregatedTsv);
      RareFilterReport report;
      Corpus out =
          FilterRare(corpus, BuildUnigramTable(acoustic), threshold, &report);
      WriteCorpus(out, out_path);
      std::printf("kept_records=%zu kept_fraction=%.6f\n", report.kept_records,
                  report.kept_fraction);
    } else if (*contr) {
      Corpus corpus = ReadAggregate(in_path, CorpusFormat::kAggregatedTsv);
      NGramModel target = NGramModel::Load(target_lm_path);
      NGramModel background = NGramModel::Load(background_lm_path);
      std::optional<InterpolatedModel> mixed;
      const LanguageModel* target_ptr = &target;
      if (contr_lambda.has_value()) {
        mixed.emplace(&background, &target, *contr_lambda);
        target_ptr = &*mixed;
      }
      std::vector<ScoredRecord> scores;
      ContrastiveReport report;
      Corpus out = SelectContrastive(corpus, *target_ptr, background,
                                     keep_percentile, weighted, &scores,
                                     &report);
      WriteCorpus(out, out_path);
      if (!scores_path.empty()) {
        WriteFile(scores_path, FormatScoresTsv(scores));
      }
      std::printf("kept_records=%zu threshold=%.9g\n", report.kept_records,
                  report.threshold);
    } else if (*mix) {
      if (std::sscanf(ratios_str.c_str(), "%u,%u,%u,%u", &mix_spec.ratios[0],
                      &mix_spec.ratios[1], &mix_spec.ratios[2],
                      &mix_spec.ratios[3]) != 4) {
        throw Error("bad --ratios (expected D,A,R,C)");
      }
      std::array<Corpus, 4> corpora;
      const std::array<const std::string*, 4> paths = {&d_path, &a_path,
                                                       &r_path, &c_path};
      std::array<const Corpus*, 4> sources{};
      for (std::size_t s = 0; s < 4; ++s) {
        if (!paths[s]->empty()) {
          corpora[s] = ReadAggregate(*paths[s], CorpusFormat::kAggregatedTsv);
          sources[s] = &corpora[s];
        }
      }
      WriteFile(out_path, FormatMixTsv(MixStream(sources, mix_spec)));
    } else if (*pipe) {
      PipelineConfig config = LoadPipelineConfig(config_path);
      PipelineResult result = RunPipeline(config);
      std::cout << "fit: " << FormatFitLine(result.fit) << "\n"
                << "downsample reduction: "
                << result.downsample_report.reduction_factor << "x\n"
                << "rare kept: " << result.rare_report.kept_records << "\n"
                << "contrastive kept: "
                << result.contrastive_report.kept_records << "\n"
                << "report rows: " << result.eval_report.rows.size() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "tailsel: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
