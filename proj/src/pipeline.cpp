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

#include "tailsel/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "json.hpp"
#include "tailsel/rng.hpp"
#include "tailsel/util.hpp"

namespace tailsel {
namespace {

using nlohmann::json;

void RejectUnknownKeys(const json& node, const char* where,
                       std::initializer_list<const char*> known) {
  for (const auto& [key, value] : node.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw Error(std::string("config: unknown field \"") + key + "\" in " +
                  where);
    }
  }
}

DownsampleSpec ParseDownsampleJson(const json& node) {
  RejectUnknownKeys(node, "downsample",
                    {"function", "beta", "fc", "paper_param", "seed"});
  DownsampleSpec spec;
  spec.function =
      ParseDownsampleFunction(node.at("function").get<std::string>());
  if (node.contains("beta")) spec.beta = node["beta"].get<double>();
  if (node.contains("fc")) spec.fc = node["fc"].get<double>();
  if (node.contains("paper_param")) {
    spec.paper_param = node["paper_param"].get<double>();
  }
  if (node.contains("seed")) spec.seed = node["seed"].get<std::uint64_t>();
  ValidateDownsampleSpec(spec);
  return spec;
}

MixSpec ParseMixJson(const json& node) {
  RejectUnknownKeys(node, "mix",
                    {"ratios", "batch_size", "num_batches", "seed"});
  MixSpec spec;
  const json& ratios = node.at("ratios");
  RejectUnknownKeys(ratios, "mix.ratios", {"D", "A", "R", "C"});
  for (std::size_t s = 0; s < 4; ++s) {
    const std::string key(1, kMixSources[s]);
    spec.ratios[s] =
        ratios.contains(key) ? ratios[key].get<std::uint32_t>() : 0;
  }
  spec.batch_size = node.at("batch_size").get<std::uint64_t>();
  spec.num_batches = node.at("num_batches").get<std::uint64_t>();
  if (node.contains("seed")) spec.seed = node["seed"].get<std::uint64_t>();
  return spec;
}

}  // namespace

PipelineConfig ParsePipelineConfig(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  RejectUnknownKeys(root, "config",
                    {"text_corpus_path", "acoustic_corpus_path", "downsample",
                     "rare_threshold", "contrastive", "mix", "eval",
                     "output_dir", "seed"});
  PipelineConfig cfg;
  try {
    cfg.text_corpus_path = root.at("text_corpus_path").get<std::string>();
    cfg.acoustic_corpus_path =
        root.at("acoustic_corpus_path").get<std::string>();
    cfg.output_dir = root.at("output_dir").get<std::string>();
    cfg.seed = root.at("seed").get<std::uint64_t>();

    json ds = root.at("downsample");
    // stage seeds default to values derived from the top-level seed, so a
    // single seed reproduces the whole run
    if (!ds.contains("seed")) {
      ds["seed"] = CounterRng::Draw(cfg.seed, 1, 0)[0];
    }
    cfg.downsample = ParseDownsampleJson(ds);

    if (root.contains("rare_threshold")) {
      cfg.rare_threshold = root["rare_threshold"].get<std::uint64_t>();
    }

    if (root.contains("contrastive")) {
      const json& c = root["contrastive"];
      RejectUnknownKeys(
          c, "contrastive",
          {"order", "discount", "lambda", "keep_percentile", "weighted"});
      if (c.contains("order")) cfg.contrastive.order = c["order"].get<int>();
      if (c.contains("discount")) {
        cfg.contrastive.discount = c["discount"].get<double>();
      }
      if (c.contains("lambda")) {
        cfg.contrastive.lambda = c["lambda"].get<double>();
      }
      if (c.contains("keep_percentile")) {
        cfg.contrastive.keep_percentile = c["keep_percentile"].get<double>();
      }
      if (c.contains("weighted")) {
        cfg.contrastive.weighted = c["weighted"].get<bool>();
      }
    }

    json mix = root.at("mix");
    if (!mix.contains("seed")) {
      mix["seed"] = CounterRng::Draw(cfg.seed, 2, 0)[0];
    }
    cfg.mix = ParseMixJson(mix);

    const json& ev = root.at("eval");
    RejectUnknownKeys(ev, "eval",
                      {"target_testset_path", "tail_testset_path", "lm_order",
                       "lm_discount", "token_budget"});
    cfg.eval.target_testset_path =
        ev.at("target_testset_path").get<std::string>();
    cfg.eval.tail_testset_path = ev.at("tail_testset_path").get<std::string>();
    if (ev.contains("lm_order")) cfg.eval.lm_order = ev["lm_order"].get<int>();
    if (ev.contains("lm_discount")) {
      cfg.eval.lm_discount = ev["lm_discount"].get<double>();
    }
    cfg.eval.token_budget = ev.at("token_budget").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return cfg;
}

PipelineConfig LoadPipelineConfig(const std::string& path) {
  return ParsePipelineConfig(ReadFile(path));
}

Corpus SampleTokenBudget(const Corpus& corpus, std::uint64_t token_budget,
                         std::uint64_t seed) {
  if (corpus.empty()) throw Error("sample: empty corpus");
  if (token_budget < 1) throw Error("sample: token budget must be positive");
  const auto& records = corpus.records();
  std::vector<std::uint64_t> cumulative(records.size());
  std::vector<std::uint32_t> token_len(records.size());
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    acc += records[i].count;
    cumulative[i] = acc;
    token_len[i] = static_cast<std::uint32_t>(
        1 + std::count(records[i].text.begin(), records[i].text.end(), ' '));
  }
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t tokens = 0;
  for (std::uint64_t draw = 0; tokens < token_budget; ++draw) {
    const double u = ToUnit(CounterRng::Draw(seed, draw, 0)[0]);
    const auto target =
        static_cast<std::uint64_t>(u * static_cast<double>(acc));
    const std::size_t idx = std::min<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), target) -
            cumulative.begin(),
        records.size() - 1);
    ++counts[records[idx].text];
    tokens += token_len[idx];
  }
  return Corpus::FromCountMap(counts);
}

EvalReport RunEvalReport(
    const std::vector<std::pair<std::string, const Corpus*>>& selections,
    const EvalConfig& cfg, const Corpus& target_testset,
    const Corpus& tail_testset, std::uint64_t seed) {
  if (target_testset.empty() || tail_testset.empty()) {
    throw Error("eval: empty testset");
  }
  if (cfg.token_budget < 1) throw Error("eval: token budget must be positive");
  EvalReport report;
  for (const auto& [label, corpus] : selections) {
    // every row samples with the same seed: identical selections produce
    // identical rows, and adding a row never perturbs the others
    Corpus sample = SampleTokenBudget(*corpus, cfg.token_budget, seed);
    NGramModel lm = NGramModel::Train(sample, cfg.lm_order, cfg.lm_discount);
    EvalRow row;
    row.label = label;
    row.total = corpus->total_count();
    row.distinct = corpus->distinct_count();
    row.logppl_target = CorpusPerplexity(lm, target_testset);
    row.logppl_tail = CorpusPerplexity(lm, tail_testset);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string FormatEvalReportTsv(const EvalReport& report) {
  std::string out = "label\ttotal\tdistinct\tlogppl_target\tlogppl_tail\n";
  char buf[64];
  for (const auto& row : report.rows) {
    out += row.label;
    out += '\t';
    out += std::to_string(row.total);
    out += '\t';
    out += std::to_string(row.distinct);
    std::snprintf(buf, sizeof(buf), "\t%.6f\t%.6f\n", row.logppl_target,
                  row.logppl_tail);
    out += buf;
  }
  return out;
}

namespace {

template <typename Fn>
auto RunStage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error(std::string("stage ") + stage + ": " + e.what());
  }
}

json FitToJson(const PowerLawFit& fit) {
  json j;
  j["A"] = fit.amplitude;
  j["alpha"] = fit.alpha;
  j["f_min"] = fit.fit_f_min;
  j["f_max"] = fit.fit_f_max;
  if (fit.fr.has_value()) {
    j["fr"] = *fit.fr;
  } else {
    j["fr"] = nullptr;
  }
  j["residual"] = fit.residual;
  return j;
}

}  // namespace

PipelineResult RunPipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const auto out_path = [&](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };

  PipelineResult result;
  json manifest;
  manifest["seed"] = config.seed;
  manifest["inputs"] = {{"text_corpus", config.text_corpus_path},
                        {"acoustic_corpus", config.acoustic_corpus_path}};

  const Corpus text = RunStage("read-text", [&] {
    return ReadAggregate(config.text_corpus_path, CorpusFormat::kAggregatedTsv);
  });
  const Corpus acoustic = RunStage("read-acoustic", [&] {
    return ReadAggregate(config.acoustic_corpus_path,
                         CorpusFormat::kAggregatedTsv);
  });

  // stage 1: histogram + power-law fit of the text corpus
  const FrequencyHistogram hist =
      RunStage("histogram", [&] { return BuildHistogram(text); });
  RunStage("histogram", [&] {
    EmitHistogramTsv(hist, out_path("hist.tsv"));
    return 0;
  });
  result.fit = RunStage("fit", [&] { return FitPowerLaw(hist); });
  RunStage("fit", [&] {
    WriteFile(out_path("fit.txt"), FormatFitLine(result.fit) + "\n");
    return 0;
  });
  manifest["stages"]["fit"] = FitToJson(result.fit);

  // stage 2: downsample
  const Corpus downsampled = RunStage("downsample", [&] {
    return DownsampleCorpus(text, config.downsample, &result.fit,
                            &result.downsample_report);
  });
  RunStage("downsample", [&] {
    WriteCorpus(downsampled, out_path("downsampled.tsv"));
    return 0;
  });
  {
    const auto& rep = result.downsample_report;
    json j;
    j["function"] = DownsampleFunctionName(rep.resolved_spec.function);
    if (rep.resolved_spec.beta) j["beta"] = *rep.resolved_spec.beta;
    if (rep.resolved_spec.fc) j["fc"] = *rep.resolved_spec.fc;
    if (config.downsample.paper_param) {
      j["paper_param"] = *config.downsample.paper_param;
    }
    j["seed"] = rep.resolved_spec.seed;
    j["input_total"] = rep.input_total;
    j["output_total"] = rep.output_total;
    j["reduction_factor"] = rep.reduction_factor;
    manifest["stages"]["downsample"] = j;
  }

  // stage 3a: rare acoustic unigram filtering of the downsampled corpus
  const UnigramTable acoustic_unigrams = RunStage(
      "rare-filter", [&] { return BuildUnigramTable(acoustic); });
  const Corpus rare = RunStage("rare-filter", [&] {
    return FilterRare(downsampled, acoustic_unigrams, config.rare_threshold,
                      &result.rare_report);
  });
  RunStage("rare-filter", [&] {
    WriteCorpus(rare, out_path("rare.tsv"));
    return 0;
  });
  manifest["stages"]["rare_filter"] = {
      {"threshold", config.rare_threshold},
      {"kept_records", result.rare_report.kept_records},
      {"kept_fraction", result.rare_report.kept_fraction},
      {"input_total", downsampled.total_count()},
      {"output_total", rare.total_count()}};

  // stage 3b: contrastive selection from the downsampled corpus; the
  // background LM trains on the fully deduplicated text corpus, the
  // target LM interpolates it with an acoustic-transcript LM
  DownsampleSpec dedup_spec;
  dedup_spec.function = DownsampleFunction::kDedup;
  const Corpus deduped = RunStage(
      "contrastive", [&] { return DownsampleCorpus(text, dedup_spec); });
  const NGramModel background_lm = RunStage("contrastive", [&] {
    return NGramModel::Train(deduped, config.contrastive.order,
                             config.contrastive.discount);
  });
  const NGramModel acoustic_lm = RunStage("contrastive", [&] {
    return NGramModel::Train(acoustic, config.contrastive.order,
                             config.contrastive.discount);
  });
  RunStage("contrastive", [&] {
    background_lm.Save(out_path("background.lm"));
    acoustic_lm.Save(out_path("acoustic.lm"));
    return 0;
  });
  const InterpolatedModel target_lm(&background_lm, &acoustic_lm,
                                    config.contrastive.lambda);
  std::vector<ScoredRecord> scores;
  const Corpus contrastive = RunStage("contrastive", [&] {
    return SelectContrastive(downsampled, target_lm, background_lm,
                             config.contrastive.keep_percentile,
                             config.contrastive.weighted, &scores,
                             &result.contrastive_report);
  });
  RunStage("contrastive", [&] {
    WriteCorpus(contrastive, out_path("contrastive.tsv"));
    WriteFile(out_path("contrastive_scores.tsv"), FormatScoresTsv(scores));
    return 0;
  });
  manifest["stages"]["contrastive"] = {
      {"order", config.contrastive.order},
      {"discount", config.contrastive.discount},
      {"lambda", config.contrastive.lambda},
      {"keep_percentile", config.contrastive.keep_percentile},
      {"weighted", config.contrastive.weighted},
      {"threshold", result.contrastive_report.threshold},
      {"kept_records", result.contrastive_report.kept_records},
      {"input_total", downsampled.total_count()},
      {"output_total", contrastive.total_count()}};

  // stage 4: minibatch mix stream
  const std::array<const Corpus*, 4> sources = {&downsampled, &acoustic,
                                                &rare, &contrastive};
  const auto batches =
      RunStage("mix", [&] { return MixStream(sources, config.mix); });
  RunStage("mix", [&] {
    WriteFile(out_path("mix.tsv"), FormatMixTsv(batches));
    return 0;
  });
  manifest["stages"]["mix"] = {{"ratios",
                                {{"D", config.mix.ratios[0]},
                                 {"A", config.mix.ratios[1]},
                                 {"R", config.mix.ratios[2]},
                                 {"C", config.mix.ratios[3]}}},
                               {"batch_size", config.mix.batch_size},
                               {"num_batches", config.mix.num_batches},
                               {"seed", config.mix.seed}};

  // stage 5: equal-budget evaluation report; empty selections cannot
  // train an LM and are skipped
  const Corpus mixed = MaterializeMix(batches);
  const Corpus target_testset = RunStage("eval", [&] {
    return ReadAggregate(config.eval.target_testset_path,
                         CorpusFormat::kAggregatedTsv);
  });
  const Corpus tail_testset = RunStage("eval", [&] {
    return ReadAggregate(config.eval.tail_testset_path,
                         CorpusFormat::kAggregatedTsv);
  });
  std::vector<std::pair<std::string, const Corpus*>> selections = {
      {"raw", &text},
      {"downsampled", &downsampled},
      {"rare", &rare},
      {"contrastive", &contrastive},
      {"mix", &mixed}};
  std::vector<std::pair<std::string, const Corpus*>> usable;
  json skipped = json::array();
  for (const auto& sel : selections) {
    if (sel.second->empty()) {
      skipped.push_back(sel.first);
    } else {
      usable.push_back(sel);
    }
  }
  const std::uint64_t eval_seed = CounterRng::Draw(config.seed, 3, 0)[0];
  result.eval_report = RunStage("eval", [&] {
    return RunEvalReport(usable, config.eval, target_testset, tail_testset,
                         eval_seed);
  });
  RunStage("eval", [&] {
    WriteFile(out_path("report.tsv"), FormatEvalReportTsv(result.eval_report));
    return 0;
  });
  manifest["stages"]["eval"] = {{"lm_order", config.eval.lm_order},
                                {"lm_discount", config.eval.lm_discount},
                                {"token_budget", config.eval.token_budget},
                                {"seed", eval_seed},
                                {"skipped_empty_selections", skipped}};

  manifest["outputs"] = {
      {"hist", "hist.tsv"},           {"fit", "fit.txt"},
      {"downsampled", "downsampled.tsv"}, {"rare", "rare.tsv"},
      {"contrastive", "contrastive.tsv"},
      {"contrastive_scores", "contrastive_scores.tsv"},
      {"background_lm", "background.lm"}, {"acoustic_lm", "acoustic.lm"},
      {"mix", "mix.tsv"},             {"report", "report.tsv"}};

  result.manifest_json = manifest.dump(2) + "\n";
  WriteFile(out_path("manifest.json"), result.manifest_json);
  return result;
}

}  // namespace tailsel
