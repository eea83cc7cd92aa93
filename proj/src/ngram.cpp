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

#include "tailsel/ngram.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <charconv>
#include <map>

#include "tailsel/util.hpp"

namespace tailsel {
namespace {

// Literal reserved symbols inside sentence text cannot be real events;
// they collapse to <unk>.
std::string SanitizeToken(const std::string& token) {
  if (token == kBos || token == kEos || token == kUnk) return kUnk;
  return token;
}

std::string JoinLast(std::span<const std::string> tokens, std::size_t len) {
  std::string key;
  for (std::size_t i = tokens.size() - len; i < tokens.size(); ++i) {
    if (!key.empty()) key.push_back(' ');
    key += tokens[i];
  }
  return key;
}

}  // namespace

double LanguageModel::ScoreToken(std::span<const std::string> context,
                                 const std::string& token) const {
  return std::log(Prob(context, token));
}

NGramModel::NGramModel(int order, double discount)
    : order_(order), discount_(discount), levels_(order) {}

NGramModel NGramModel::Train(const Corpus& corpus, int order,
                             double discount) {
  if (corpus.empty()) throw Error("lm-train: empty corpus");
  if (order < 1 || order > 5) throw Error("lm-train: order must be in 1..5");
  if (!(discount > 0 && discount < 1)) {
    throw Error("lm-train: discount must be in (0,1)");
  }

  NGramModel model(order, discount);
  const auto& records = corpus.records();
  const int num_shards = std::max(1, MaxThreads());
  using RawCounts =
      std::unordered_map<std::string,
                         std::unordered_map<std::string, std::uint64_t>>;
  std::vector<std::vector<RawCounts>> shards(
      num_shards, std::vector<RawCounts>(order));

#pragma omp parallel num_threads(num_shards)
  {
    auto& local = shards[omp_get_thread_num()];
    const std::string eos = kEos;
#pragma omp for schedule(static)
    for (std::size_t r = 0; r < records.size(); ++r) {
      const std::uint64_t weight = records[r].count;
      std::vector<std::string> history(order - 1, kBos);
      for (auto& token : Tokenize(records[r].text)) {
        history.push_back(SanitizeToken(token));
      }
      const std::size_t m = history.size() - (order - 1);
      for (std::size_t i = 0; i < m + 1; ++i) {
        const std::string& event = i < m ? history[order - 1 + i] : eos;
        std::span<const std::string> window(history.data() + i, order - 1);
        for (int len = 0; len < order; ++len) {
          local[len][JoinLast(window, len)][event] += weight;
        }
      }
    }
  }

  for (auto& shard : shards) {
    for (int len = 0; len < order; ++len) {
      for (auto& [ctx, counts] : shard[len]) {
        auto& node = model.levels_[len][ctx];
        for (auto& [token, count] : counts) {
          node.counts[token] += count;
          node.total += count;
        }
      }
    }
  }
  model.FinishConstruction();
  return model;
}

void NGramModel::FinishConstruction() {
  vocab_.clear();
  base_total_ = 0;
  auto it = levels_[0].find("");
  if (it == levels_[0].end()) throw Error("ngram: model has no unigram counts");
  for (const auto& [token, count] : it->second.counts) {
    if (token == kEos) continue;
    base_total_ += count;
    if (token != kUnk) vocab_.insert(token);
  }
}

double NGramModel::BaseProb(const std::string& token) const {
  const auto& unigrams = levels_[0].at("").counts;
  std::uint64_t count = 0;
  if (token != kEos) {
    auto it = unigrams.find(token);
    if (it != unigrams.end()) count = it->second;
  }
  return (static_cast<double>(count) + 1.0) /
         (static_cast<double>(base_total_) +
          static_cast<double>(vocab_.size()) + 2.0);
}

double NGramModel::ProbAtLevel(std::span<const std::string> context,
                               std::size_t len,
                               const std::string& token) const {
  if (len == 0) return BaseProb(token);
  const auto& level = levels_[len];
  auto it = level.find(JoinLast(context, len));
  if (it == level.end()) return ProbAtLevel(context, len - 1, token);
  const ContextCounts& node = it->second;
  const double lower = ProbAtLevel(context, len - 1, token);
  double held = 0.0;
  auto cit = node.counts.find(token);
  if (cit != node.counts.end()) {
    held = std::max(static_cast<double>(cit->second) - discount_, 0.0) /
           static_cast<double>(node.total);
  }
  const double backoff_mass = discount_ *
                              static_cast<double>(node.counts.size()) /
                              static_cast<double>(node.total);
  return held + backoff_mass * lower;
}

double NGramModel::Prob(std::span<const std::string> context,
                        const std::string& token) const {
  // Predicted token: </s> is the terminal event; everything else maps
  // into the vocabulary or <unk>.
  std::string event;
  if (token == kEos) {
    event = kEos;
  } else {
    event = SanitizeToken(token);
    if (event != kUnk && !vocab_.contains(event)) event = kUnk;
  }

  // Context tokens: <s> padding is meaningful as-is; unknown tokens map
  // to <unk> so scoring matches how such sentences would have trained.
  const std::size_t len =
      std::min<std::size_t>(order_ - 1, context.size());
  std::vector<std::string> window;
  window.reserve(len);
  for (std::size_t i = context.size() - len; i < context.size(); ++i) {
    const std::string& t = context[i];
    if (t == kBos || t == kEos || vocab_.contains(t)) {
      window.push_back(t);
    } else {
      window.push_back(kUnk);
    }
  }
  return ProbAtLevel(window, len, event);
}

std::string NGramModel::Serialize() const {
  // one line per n-gram, sorted lexicographically across all orders
  // (tab sorts below every token character, so this equals sorting by
  // (context, token))
  std::vector<std::string> lines;
  for (int len = 0; len < order_; ++len) {
    for (const auto& [ctx, node] : levels_[len]) {
      for (const auto& [token, count] : node.counts) {
        lines.push_back(ctx + "\t" + token + "\t" + std::to_string(count));
      }
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string out = "ngram v1 order=" + std::to_string(order_) +
                    " discount=" + FormatDouble(discount_) + "\n";
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

void NGramModel::Save(const std::string& path) const {
  WriteFile(path, Serialize());
}

NGramModel NGramModel::Deserialize(const std::string& content) {
  std::size_t header_end = content.find('\n');
  if (header_end == std::string::npos) throw Error("ngram: missing header");
  const std::string header = content.substr(0, header_end);
  int order = 0;
  double discount = 0;
  if (std::sscanf(header.c_str(), "ngram v1 order=%d discount=%lf", &order,
                  &discount) != 2) {
    throw Error("ngram: malformed header: " + header);
  }
  if (order < 1 || order > 5 || !(discount > 0 && discount < 1)) {
    throw Error("ngram: invalid order/discount in header");
  }

  NGramModel model(order, discount);
  std::size_t pos = header_end + 1;
  std::size_t line_no = 1;
  while (pos < content.size()) {
    ++line_no;
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) {
      throw Error("ngram: malformed line " + std::to_string(line_no));
    }
    const std::string ctx(line.substr(0, tab1));
    const std::string token(line.substr(tab1 + 1, tab2 - tab1 - 1));
    std::uint64_t count = 0;
    auto r = std::from_chars(line.data() + tab2 + 1, line.data() + line.size(),
                             count);
    if (r.ec != std::errc() || r.ptr != line.data() + line.size() ||
        count == 0 || token.empty()) {
      throw Error("ngram: malformed line " + std::to_string(line_no));
    }
    const std::size_t ctx_len =
        ctx.empty() ? 0 : 1 + std::count(ctx.begin(), ctx.end(), ' ');
    if (ctx_len >= static_cast<std::size_t>(order)) {
      throw Error("ngram: context longer than order-1 at line " +
                  std::to_string(line_no));
    }
    auto& node = model.levels_[ctx_len][ctx];
    node.counts[token] += count;
    node.total += count;
  }
  model.FinishConstruction();
  return model;
}

NGramModel NGramModel::Load(const std::string& path) {
  return Deserialize(ReadFile(path));
}

InterpolatedModel::InterpolatedModel(const LanguageModel* background,
                                     const LanguageModel* acoustic,
                                     double lambda)
    : background_(background), acoustic_(acoustic), lambda_(lambda) {
  if (background_->order() != acoustic_->order()) {
    throw Error("interpolation: component models must share order");
  }
  if (!(lambda >= 0 && lambda <= 1)) {
    throw Error("interpolation: lambda must be in [0,1]");
  }
}

double InterpolatedModel::Prob(std::span<const std::string> context,
                               const std::string& token) const {
  return lambda_ * acoustic_->Prob(context, token) +
         (1.0 - lambda_) * background_->Prob(context, token);
}

double LogPerplexity(const LanguageModel& model, std::string_view sentence) {
  const int order = model.order();
  std::vector<std::string> history(order - 1, kBos);
  for (auto& token : Tokenize(Normalize(sentence))) {
    history.push_back(std::move(token));
  }
  const std::size_t m = history.size() - (order - 1);
  const std::string eos = kEos;
  double sum = 0.0;
  for (std::size_t i = 0; i < m + 1; ++i) {
    const std::string& event = i < m ? history[order - 1 + i] : eos;
    std::span<const std::string> context(history.data() + i, order - 1);
    sum += std::log(model.Prob(context, event));
  }
  return -sum / static_cast<double>(m + 1);
}

double CorpusPerplexity(const LanguageModel& model, const Corpus& corpus) {
  if (corpus.empty()) throw Error("perplexity: empty corpus");
  const auto& records = corpus.records();
  std::vector<double> ppl(records.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < records.size(); ++i) {
    ppl[i] = LogPerplexity(model, records[i].text);
  }
  // serial fold in canonical record order, so the result is bit-identical
  // for every thread count
  double weighted = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    weighted += static_cast<double>(records[i].count) * ppl[i];
  }
  return weighted / static_cast<double>(corpus.total_count());
}

}  // namespace tailsel
