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

#include "tailsel/reference.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "tailsel/rng.hpp"
#include "tailsel/util.hpp"

namespace tailsel::reference {

Corpus AggregateLines(const std::vector<std::string>& lines,
                      CorpusFormat format) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (format == CorpusFormat::kRawLines) {
      std::string text = Normalize(line);
      if (!text.empty()) ++counts[text];
      continue;
    }
    const std::size_t tab = line.find('\t');
    std::uint64_t count = 0;
    bool ok = tab != std::string::npos;
    if (ok) {
      try {
        std::size_t used = 0;
        count = std::stoull(line.substr(0, tab), &used);
        ok = used == tab && count > 0;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) throw Error("line " + std::to_string(i + 1) + ": malformed");
    std::string text = Normalize(std::string_view(line).substr(tab + 1));
    if (!text.empty()) counts[text] += count;
  }
  return Corpus::FromCountMap(counts);
}

FrequencyHistogram BuildHistogram(const Corpus& corpus) {
  if (corpus.empty()) throw Error("histogram: empty corpus");
  FrequencyHistogram hist;
  for (const auto& r : corpus.records()) ++hist.bins[r.count];
  return hist;
}

Corpus DownsampleCorpus(const Corpus& corpus, const DownsampleSpec& spec,
                        const PowerLawFit* fit, DownsampleReport* report) {
  ValidateDownsampleSpec(spec);
  DownsampleSpec concrete = spec;
  if (spec.NeedsResolution()) {
    if (fit == nullptr) throw Error("downsample: convention parameter given but no fit available");
    concrete = ResolveParams(spec, *fit);
  }
  std::vector<SentenceRecord> kept;
  std::uint64_t output_total = 0;
  for (const auto& r : corpus.records()) {
    std::uint64_t realized;
    if (concrete.function == DownsampleFunction::kNone) {
      realized = r.count;
    } else {
      realized = RealizeCount(
          DownsampleFrequency(concrete, static_cast<double>(r.count)), r.text,
          concrete.seed);
    }
    if (realized == 0) continue;
    kept.push_back({r.text, realized});
    output_total += realized;
  }
  if (report != nullptr) {
    report->input_total = corpus.total_count();
    report->output_total = output_total;
    report->reduction_factor =
        output_total == 0 ? std::numeric_limits<double>::infinity()
                          : static_cast<double>(corpus.total_count()) /
                                static_cast<double>(output_total);
    report->resolved_spec = concrete;
  }
  return Corpus::FromRecords(std::move(kept));
}

UnigramTable BuildUnigramTable(const Corpus& acoustic) {
  if (acoustic.empty()) throw Error("unigram table: empty corpus");
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& r : acoustic.records()) {
    for (const auto& token : Tokenize(r.text)) freq[token] += r.count;
  }
  return UnigramTable(std::move(freq));
}

Corpus FilterRare(const Corpus& corpus, const UnigramTable& table,
                  std::uint64_t threshold) {
  std::vector<SentenceRecord> kept;
  for (const auto& r : corpus.records()) {
    for (const auto& token : Tokenize(r.text)) {
      if (table.Frequency(token) < threshold) {
        kept.push_back(r);
        break;
      }
    }
  }
  return Corpus::FromRecords(std::move(kept));
}

NGramModel TrainNGram(const Corpus& corpus, int order, double discount) {
  if (corpus.empty()) throw Error("lm-train: empty corpus");
  if (order < 1 || order > 5) throw Error("lm-train: order must be in 1..5");
  if (!(discount > 0 && discount < 1)) {
    throw Error("lm-train: discount must be in (0,1)");
  }
  // Serial counting emitted straight into the model text format; the
  // format is the public contract, so the parallel trainer must serialize
  // to these exact bytes.
  std::vector<std::map<std::string, std::map<std::string, std::uint64_t>>>
      levels(order);
  const std::string bos = kBos;
  const std::string eos = kEos;
  for (const auto& r : corpus.records()) {
    std::vector<std::string> history(order - 1, bos);
    for (auto& token : Tokenize(r.text)) {
      if (token == kBos || token == kEos || token == kUnk) token = kUnk;
      history.push_back(std::move(token));
    }
    const std::size_t m = history.size() - (order - 1);
    for (std::size_t i = 0; i < m + 1; ++i) {
      const std::string& event = i < m ? history[order - 1 + i] : eos;
      for (int len = 0; len < order; ++len) {
        std::string key;
        for (std::size_t j = i + (order - 1 - len); j < i + (order - 1); ++j) {
          if (!key.empty()) key.push_back(' ');
          key += history[j];
        }
        levels[len][key][event] += r.count;
      }
    }
  }
  std::vector<std::string> lines;
  for (int len = 0; len < order; ++len) {
    for (const auto& [ctx, counts] : levels[len]) {
      for (const auto& [token, count] : counts) {
        lines.push_back(ctx + "\t" + token + "\t" + std::to_string(count));
      }
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string text = "ngram v1 order=" + std::to_string(order) +
                     " discount=" + FormatDouble(discount) + "\n";
  for (const auto& line : lines) text += line + "\n";
  return NGramModel::Deserialize(text);
}

std::vector<ScoredRecord> ScoreCorpus(const Corpus& corpus,
                                      const LanguageModel& target,
                                      const LanguageModel& background) {
  if (target.order() != background.order()) {
    throw Error("contrastive: target and background LM order mismatch");
  }
  std::vector<ScoredRecord> scored;
  scored.reserve(corpus.records().size());
  for (const auto& r : corpus.records()) {
    scored.push_back({r.text, r.count,
                      LogPerplexity(target, r.text) -
                          LogPerplexity(background, r.text)});
  }
  return scored;
}

double CorpusPerplexity(const LanguageModel& model, const Corpus& corpus) {
  if (corpus.empty()) throw Error("perplexity: empty corpus");
  double weighted = 0.0;
  for (const auto& r : corpus.records()) {
    weighted += static_cast<double>(r.count) * LogPerplexity(model, r.text);
  }
  return weighted / static_cast<double>(corpus.total_count());
}

std::vector<MixBatch> MixStream(const std::array<const Corpus*, 4>& sources,
                                const MixSpec& spec) {
  const std::uint32_t ratio_sum =
      spec.ratios[0] + spec.ratios[1] + spec.ratios[2] + spec.ratios[3];
  if (ratio_sum != 100) throw Error("mix: ratios must sum to 100");
  std::array<std::vector<std::uint64_t>, 4> cumulative;
  for (std::size_t s = 0; s < 4; ++s) {
    if (spec.ratios[s] == 0) continue;
    if (sources[s] == nullptr || sources[s]->empty()) {
      throw Error(std::string("mix: source ") + kMixSources[s] +
                  " has a positive ratio but no sentences");
    }
    std::uint64_t acc = 0;
    for (const auto& r : sources[s]->records()) {
      acc += r.count;
      cumulative[s].push_back(acc);
    }
  }
  std::vector<MixBatch> batches(spec.num_batches);
  for (std::uint64_t b = 0; b < spec.num_batches; ++b) {
    batches[b].resize(spec.batch_size);
    for (std::uint64_t slot = 0; slot < spec.batch_size; ++slot) {
      const auto draws = CounterRng::Draw(spec.seed, b, slot);
      const double u_source = ToUnit(draws[0]);
      double acc = 0;
      std::size_t s = 0;
      for (; s < 3; ++s) {
        acc += static_cast<double>(spec.ratios[s]) / 100.0;
        if (u_source < acc) break;
      }
      const auto& cum = cumulative[s];
      const auto target_mass = static_cast<std::uint64_t>(
          ToUnit(draws[1]) * static_cast<double>(cum.back()));
      const std::size_t idx = std::min<std::size_t>(
          std::upper_bound(cum.begin(), cum.end(), target_mass) - cum.begin(),
          cum.size() - 1);
      batches[b][slot] = {kMixSources[s], &sources[s]->records()[idx].text};
    }
  }
  return batches;
}

}  // namespace tailsel::reference
