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

// Times the OpenMP kernels against their single-threaded reference
// implementations on a synthetic corpus and verifies they produce
// identical output while doing so.
//
//   usage: tailsel_bench [records_scale]

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "tailsel/contrastive.hpp"
#include "tailsel/corpus.hpp"
#include "tailsel/downsample.hpp"
#include "tailsel/mixer.hpp"
#include "tailsel/ngram.hpp"
#include "tailsel/rare_filter.hpp"
#include "tailsel/reference.hpp"
#include "tailsel/stats.hpp"
#include "tailsel/util.hpp"

using namespace tailsel;

namespace {

struct Row {
  const char* name;
  double serial_s;
  double parallel_s;
  bool identical;
};

template <typename SerialFn, typename ParallelFn>
Row TimeKernel(const char* name, SerialFn serial, ParallelFn parallel) {
  const double t0 = omp_get_wtime();
  const std::string serial_out = serial();
  const double t1 = omp_get_wtime();
  const std::string parallel_out = parallel();
  const double t2 = omp_get_wtime();
  return {name, t1 - t0, t2 - t1, serial_out == parallel_out};
}

std::string HistToString(const FrequencyHistogram& hist) {
  return FormatHistogramTsv(hist);
}

std::string ScoresToString(const std::vector<ScoredRecord>& scores) {
  std::ostringstream out;
  for (const auto& s : scores) out << s.text << '\t' << s.score << '\n';
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  const double scale = argc > 1 ? std::atof(argv[1]) : 1.0;

  ZipfGenSpec text_spec;
  text_spec.amplitude = 30000 * scale;
  text_spec.alpha = 1.3;
  text_spec.f_max = 3000;
  text_spec.vocab_size = 5000;
  text_spec.max_len = 10;
  text_spec.seed = 1;
  text_spec.head_boost = {{50000, 5}};
  const Corpus text = GenZipf(text_spec);

  ZipfGenSpec acoustic_spec;
  acoustic_spec.amplitude = 8000 * scale;
  acoustic_spec.alpha = 1.6;
  acoustic_spec.f_max = 500;
  acoustic_spec.vocab_size = 5000;
  acoustic_spec.max_len = 10;
  acoustic_spec.domain_profile = 0.5;
  acoustic_spec.seed = 2;
  const Corpus acoustic = GenZipf(acoustic_spec);

  std::printf("corpus: %zu distinct / %llu total; acoustic: %zu distinct; "
              "threads: %d\n\n",
              text.distinct_count(),
              static_cast<unsigned long long>(text.total_count()),
              acoustic.distinct_count(), MaxThreads());

  std::vector<std::string> lines;
  {
    std::istringstream in(FormatCorpus(text));
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }

  DownsampleSpec softlog;
  softlog.function = DownsampleFunction::kSoftLog;
  softlog.fc = 30;
  softlog.seed = 7;

  const UnigramTable table = BuildUnigramTable(acoustic);
  const Corpus downsampled = DownsampleCorpus(text, softlog);
  const NGramModel background_lm = NGramModel::Train(text, 3, 0.75);
  const NGramModel acoustic_lm = NGramModel::Train(acoustic, 3, 0.75);
  const InterpolatedModel target_lm(&background_lm, &acoustic_lm, 0.5);

  MixSpec mix;
  mix.ratios = {40, 20, 20, 20};
  mix.batch_size = 256;
  mix.num_batches = 400;
  mix.seed = 3;
  const Corpus rare = FilterRare(downsampled, table, 15);
  const Corpus contrastive_quarter = rare;  // any non-empty source works
  const std::array<const Corpus*, 4> sources = {&downsampled, &acoustic,
                                                &rare, &contrastive_quarter};

  std::vector<Row> rows;
  rows.push_back(TimeKernel(
      "aggregate lines",
      [&] {
        return FormatCorpus(
            reference::AggregateLines(lines, CorpusFormat::kAggregatedTsv));
      },
      [&] {
        return FormatCorpus(
            AggregateLines(lines, CorpusFormat::kAggregatedTsv));
      }));
  rows.push_back(TimeKernel(
      "histogram",
      [&] { return HistToString(reference::BuildHistogram(text)); },
      [&] { return HistToString(BuildHistogram(text)); }));
  rows.push_back(TimeKernel(
      "downsample",
      [&] { return FormatCorpus(reference::DownsampleCorpus(text, softlog)); },
      [&] { return FormatCorpus(DownsampleCorpus(text, softlog)); }));
  rows.push_back(TimeKernel(
      "unigram table",
      [&] {
        return std::to_string(
            reference::BuildUnigramTable(acoustic).total_tokens());
      },
      [&] { return std::to_string(BuildUnigramTable(acoustic).total_tokens()); }));
  rows.push_back(TimeKernel(
      "rare filter",
      [&] {
        return FormatCorpus(reference::FilterRare(downsampled, table, 15));
      },
      [&] { return FormatCorpus(FilterRare(downsampled, table, 15)); }));
  rows.push_back(TimeKernel(
      "lm train (order 3)",
      [&] { return reference::TrainNGram(text, 3, 0.75).Serialize(); },
      [&] { return NGramModel::Train(text, 3, 0.75).Serialize(); }));
  rows.push_back(TimeKernel(
      "contrastive scoring",
      [&] {
        return ScoresToString(
            reference::ScoreCorpus(downsampled, target_lm, background_lm));
      },
      [&] {
        return ScoresToString(
            ScoreCorpus(downsampled, target_lm, background_lm));
      }));
  rows.push_back(TimeKernel(
      "corpus perplexity",
      [&] {
        return std::to_string(
            reference::CorpusPerplexity(background_lm, downsampled));
      },
      [&] {
        return std::to_string(CorpusPerplexity(background_lm, downsampled));
      }));
  rows.push_back(TimeKernel(
      "mix stream",
      [&] { return FormatMixTsv(reference::MixStream(sources, mix)); },
      [&] { return FormatMixTsv(MixStream(sources, mix)); }));

  std::printf("%-22s %10s %10s %9s %s\n", "kernel", "serial", "openmp",
              "speedup", "identical");
  bool all_identical = true;
  for (const auto& row : rows) {
    std::printf("%-22s %9.3fs %9.3fs %8.2fx %s\n", row.name, row.serial_s,
                row.parallel_s, row.serial_s / row.parallel_s,
                row.identical ? "yes" : "NO");
    all_identical &= row.identical;
  }
  if (!all_identical) {
    std::printf("\nERROR: parallel output diverged from the serial "
                "reference\n");
    return 1;
  }
  return 0;
}
