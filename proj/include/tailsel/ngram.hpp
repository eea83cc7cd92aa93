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

#ifndef TAILSEL_NGRAM_HPP_
#define TAILSEL_NGRAM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tailsel/corpus.hpp"

namespace tailsel {

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";
inline constexpr const char* kUnk = "<unk>";

// Anything that can assign a probability to a token in context.  Contexts
// are raw token sequences (with <s> padding supplied by the caller);
// implementations map out-of-vocabulary tokens themselves.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual int order() const = 0;
  virtual double Prob(std::span<const std::string> context,
                      const std::string& token) const = 0;
  double ScoreToken(std::span<const std::string> context,
                    const std::string& token) const;
};

// Interpolated absolute discounting over counts of every order up to n:
//
//   p_k(t|c) = max(c(c,t) - d, 0)/c(c) + (d * T(c)/c(c)) * p_{k-1}(t|c')
//
// where c' drops the oldest context token and T(c) is the number of
// distinct continuations of c.  Unseen contexts back off with full mass.
// The base case is an add-one-smoothed unigram over vocab + {<unk>, </s>}
// whose tally excludes end-of-sentence events.  Every token therefore has
// positive probability, and each context's probabilities sum to 1.
class NGramModel : public LanguageModel {
 public:
  // Accumulates counts per record weighted by record.count, padding each
  // sentence with (order-1) <s> tokens and one terminal </s>.
  static NGramModel Train(const Corpus& corpus, int order, double discount);

  static NGramModel Load(const std::string& path);
  static NGramModel Deserialize(const std::string& content);
  std::string Serialize() const;  // byte-stable text format
  void Save(const std::string& path) const;

  int order() const override { return order_; }
  double discount() const { return discount_; }
  std::size_t vocab_size() const { return vocab_.size(); }

  double Prob(std::span<const std::string> context,
              const std::string& token) const override;

 private:
  NGramModel(int order, double discount);

  double ProbAtLevel(std::span<const std::string> context, std::size_t len,
                     const std::string& token) const;
  double BaseProb(const std::string& token) const;
  void FinishConstruction();  // derives vocab and the base tally

  struct ContextCounts {
    std::uint64_t total = 0;
    std::unordered_map<std::string, std::uint64_t> counts;
  };

  int order_;
  double discount_;
  // levels_[len]: contexts of exactly `len` tokens, keyed by the
  // space-joined context.
  std::vector<std::unordered_map<std::string, ContextCounts>> levels_;
  std::unordered_set<std::string> vocab_;
  std::uint64_t base_total_ = 0;  // unigram mass excluding </s> events
};

// Probability-space mix lambda * acoustic + (1 - lambda) * background;
// the n-gram stand-in for fine-tuning the background model on acoustic
// transcripts.  Both components must share the same order.
class InterpolatedModel : public LanguageModel {
 public:
  InterpolatedModel(const LanguageModel* background,
                    const LanguageModel* acoustic, double lambda);

  int order() const override { return background_->order(); }
  double Prob(std::span<const std::string> context,
              const std::string& token) const override;

 private:
  const LanguageModel* background_;
  const LanguageModel* acoustic_;
  double lambda_;
};

// Mean negative natural-log probability over the sentence's tokens plus
// the terminal </s> event.  An empty sentence scores the </s> event only.
double LogPerplexity(const LanguageModel& model, std::string_view sentence);

// Count-weighted mean of LogPerplexity over the corpus records.
double CorpusPerplexity(const LanguageModel& model, const Corpus& corpus);

}  // namespace tailsel

#endif  // TAILSEL_NGRAM_HPP_
