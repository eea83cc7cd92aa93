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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <random>
#include <set>
#include <unordered_set>

#include "doctest.h"
#include "tailsel/corpus.hpp"
#include "tailsel/ngram.hpp"
#include "tailsel/reference.hpp"
#include "tailsel/util.hpp"
#include "test_helpers.hpp"

using namespace tailsel;
using testing::MakeCorpus;
using testing::TempDir;

namespace {

// fixed-probability stand-in for checking the perplexity arithmetic
class UniformModel : public LanguageModel {
 public:
  UniformModel(int order, double p) : order_(order), p_(p) {}
  int order() const override { return order_; }
  double Prob(std::span<const std::string>, const std::string&) const override {
    return p_;
  }

 private:
  int order_;
  double p_;
};

std::set<std::string> VocabOf(const Corpus& corpus) {
  std::set<std::string> vocab;
  for (const auto& r : corpus.records()) {
    for (const auto& tok : Tokenize(r.text)) vocab.insert(tok);
  }
  return vocab;
}

// exhaustive event-space sum for one context
double ContextProbSum(const LanguageModel& model,
                      const std::vector<std::string>& context,
                      const std::set<std::string>& vocab) {
  double sum = 0;
  for (const auto& tok : vocab) sum += model.Prob(context, tok);
  sum += model.Prob(context, kUnk);
  sum += model.Prob(context, kEos);
  return sum;
}

}  // namespace

TEST_CASE("bigram training counts each padded event with record weight") {
  Corpus corpus = MakeCorpus({{"a b", 2}});
  NGramModel model = NGramModel::Train(corpus, 2, 0.75);
  CHECK(model.Serialize() ==
        "ngram v1 order=2 discount=0.75\n"
        "\t</s>\t2\n"
        "\ta\t2\n"
        "\tb\t2\n"
        "<s>\ta\t2\n"
        "a\tb\t2\n"
        "b\t</s>\t2\n");
}

TEST_CASE("order-1 training keeps only unigram counts") {
  NGramModel model = NGramModel::Train(MakeCorpus({{"a b a", 3}}), 1, 0.5);
  CHECK(model.Serialize() ==
        "ngram v1 order=1 discount=0.5\n"
        "\t</s>\t3\n"
        "\ta\t6\n"
        "\tb\t3\n");
}

TEST_CASE("training twice gives identical model files") {
  Corpus corpus = MakeCorpus({{"turn on tv", 4}, {"weather", 9}, {"a b c", 1}});
  CHECK(NGramModel::Train(corpus, 3, 0.75).Serialize() ==
        NGramModel::Train(corpus, 3, 0.75).Serialize());
  // thread count does not change the counts
  SetMaxThreads(1);
  const std::string serial = NGramModel::Train(corpus, 3, 0.75).Serialize();
  SetMaxThreads(8);
  const std::string parallel = NGramModel::Train(corpus, 3, 0.75).Serialize();
  SetMaxThreads(0);
  CHECK(serial == parallel);
  // and the single-threaded reference trainer produces the same bytes
  CHECK(reference::TrainNGram(corpus, 3, 0.75).Serialize() == serial);
}

TEST_CASE("train validates its inputs") {
  CHECK_THROWS_AS(NGramModel::Train(Corpus(), 2, 0.75), Error);
  Corpus corpus = MakeCorpus({{"a", 1}});
  CHECK_THROWS_AS(NGramModel::Train(corpus, 0, 0.75), Error);
  CHECK_THROWS_AS(NGramModel::Train(corpus, 6, 0.75), Error);
  CHECK_THROWS_AS(NGramModel::Train(corpus, 2, 0.0), Error);
  CHECK_THROWS_AS(NGramModel::Train(corpus, 2, 1.0), Error);
}

TEST_CASE("unigram add-one base case") {
  // corpus "a a b": token tally a:2 b:1 (EOS excluded), event space
  // {a, b, <unk>, </s>} of size vocab+2, so p(a) = (2+1)/(3+4)
  NGramModel model = NGramModel::Train(MakeCorpus({{"a a b", 1}}), 1, 0.75);
  const std::vector<std::string> empty_ctx;
  CHECK(model.ScoreToken(empty_ctx, "a") ==
        doctest::Approx(std::log(3.0 / 7.0)).epsilon(1e-12));
  CHECK(model.ScoreToken(empty_ctx, "b") ==
        doctest::Approx(std::log(2.0 / 7.0)).epsilon(1e-12));
  CHECK(model.ScoreToken(empty_ctx, kUnk) ==
        doctest::Approx(std::log(1.0 / 7.0)).epsilon(1e-12));
  CHECK(model.ScoreToken(empty_ctx, kEos) ==
        doctest::Approx(std::log(1.0 / 7.0)).epsilon(1e-12));
  // the four probabilities cover the whole event space
  CHECK(ContextProbSum(model, {}, {"a", "b"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("probabilities sum to 1 for every context") {
  std::mt19937 gen(17);
  const char* words[] = {"red", "green", "blue", "cyan", "amber"};
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<SentenceRecord> records;
    const int n = 2 + static_cast<int>(gen() % 8);
    for (int i = 0; i < n; ++i) {
      std::string text;
      const int len = 1 + static_cast<int>(gen() % 5);
      for (int j = 0; j < len; ++j) {
        if (j > 0) text.push_back(' ');
        text += words[gen() % 5];
      }
      records.push_back({text, 1 + gen() % 6});
    }
    Corpus corpus = Corpus::FromRecords(std::move(records));
    const int order = 1 + static_cast<int>(gen() % 3);
    NGramModel model = NGramModel::Train(corpus, order, 0.75);
    const auto vocab = VocabOf(corpus);

    // seen and unseen contexts, including <s> padding positions
    std::vector<std::vector<std::string>> contexts = {
        {}, {"red"}, {"nonsense"}, {kBos, "red"}, {"red", "green"},
        {"nonsense", "blue"}, {kBos}, {"amber", "amber"}};
    for (const auto& ctx : contexts) {
      CHECK(ContextProbSum(model, ctx, vocab) ==
            doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("more evidence never lowers the conditional probability") {
  const std::vector<std::string> ctx = {"x"};
  double prev = 0.0;
  for (std::uint64_t k = 1; k <= 12; ++k) {
    Corpus corpus = MakeCorpus({{"x t", k}, {"x u", 3}, {"u x", 2}});
    NGramModel model = NGramModel::Train(corpus, 2, 0.75);
    const double p = model.Prob(ctx, "t");
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("interpolated model endpoints and bounds") {
  Corpus bg_corpus = MakeCorpus({{"red green", 5}, {"blue", 2}});
  Corpus ac_corpus = MakeCorpus({{"green red", 3}, {"red", 4}});
  NGramModel bg = NGramModel::Train(bg_corpus, 2, 0.75);
  NGramModel ac = NGramModel::Train(ac_corpus, 2, 0.75);

  InterpolatedModel all_acoustic(&bg, &ac, 1.0);
  InterpolatedModel all_background(&bg, &ac, 0.0);
  InterpolatedModel half(&bg, &ac, 0.5);

  for (const std::string& sentence :
       {std::string("red green"), std::string("blue red"),
        std::string("nonsense"), std::string("")}) {
    CHECK(LogPerplexity(all_acoustic, sentence) ==
          doctest::Approx(LogPerplexity(ac, sentence)).epsilon(1e-12));
    CHECK(LogPerplexity(all_background, sentence) ==
          doctest::Approx(LogPerplexity(bg, sentence)).epsilon(1e-12));
  }

  std::vector<std::vector<std::string>> contexts = {{}, {"red"}, {kBos}};
  for (const auto& ctx : contexts) {
    for (const std::string& tok :
         {std::string("red"), std::string("green"), std::string(kEos)}) {
      const double pa = ac.Prob(ctx, tok);
      const double pb = bg.Prob(ctx, tok);
      const double mix = half.Prob(ctx, tok);
      CHECK(mix >= std::min(pa, pb) - 1e-15);
      CHECK(mix <= std::max(pa, pb) + 1e-15);
    }
  }
}

TEST_CASE("interpolation requires matching orders") {
  Corpus corpus = MakeCorpus({{"a b", 1}});
  NGramModel m2 = NGramModel::Train(corpus, 2, 0.75);
  NGramModel m3 = NGramModel::Train(corpus, 3, 0.75);
  CHECK_THROWS_AS(InterpolatedModel(&m2, &m3, 0.5), Error);
  CHECK_THROWS_AS(InterpolatedModel(&m2, &m2, 1.5), Error);
}

TEST_CASE("log perplexity of a uniform model is log of the event count") {
  UniformModel quarter(2, 0.25);
  CHECK(LogPerplexity(quarter, "any old sentence") ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(LogPerplexity(quarter, "") ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("in-domain sentences score lower than OOV sentences") {
  Corpus corpus = MakeCorpus({{"red green blue", 1}});
  NGramModel model = NGramModel::Train(corpus, 2, 0.75);
  CHECK(LogPerplexity(model, "red green blue") <
        LogPerplexity(model, "quux zork frobnicate"));
}

TEST_CASE("every sentence has finite perplexity") {
  NGramModel model =
      NGramModel::Train(MakeCorpus({{"red green", 2}}), 3, 0.75);
  for (const std::string& s :
       {std::string(""), std::string("zzz yyy xxx www"),
        std::string("red red red red red red"), std::string("<s> </s>")}) {
    const double l = LogPerplexity(model, s);
    CHECK(std::isfinite(l));
    CHECK(l >= 0);
  }
}

TEST_CASE("model files round-trip bit-exactly") {
  TempDir dir("ngram_io");
  Corpus corpus = MakeCorpus(
      {{"turn on konigsberg tv", 2}, {"weather", 11}, {"turn off tv", 3}});
  NGramModel model = NGramModel::Train(corpus, 3, 0.6);
  const std::string path = dir.File("model.lm");
  model.Save(path);
  NGramModel loaded = NGramModel::Load(path);
  CHECK(loaded.Serialize() == model.Serialize());

  // body lines are lexicographically sorted
  std::vector<std::string> lines;
  std::istringstream body(model.Serialize());
  std::string line;
  std::getline(body, line);  // header
  while (std::getline(body, line)) lines.push_back(line);
  CHECK(std::is_sorted(lines.begin(), lines.end()));

  // scores match bit for bit
  for (const std::string& s :
       {std::string("turn on tv"), std::string("weather"),
        std::string("oov words here"), std::string("")}) {
    const double a = LogPerplexity(model, s);
    const double b = LogPerplexity(loaded, s);
    CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
  }
}

TEST_CASE("model deserialization rejects malformed input") {
  CHECK_THROWS_AS(NGramModel::Deserialize("not a model\n"), Error);
  CHECK_THROWS_AS(NGramModel::Deserialize("ngram v1 order=2 discount=0.75\n"
                                          "only-two\tfields\n"),
                  Error);
  CHECK_THROWS_AS(NGramModel::Deserialize("ngram v1 order=1 discount=0.75\n"
                                          "a b\tc\t3\n"),
                  Error);  // context longer than order-1
  CHECK_THROWS_AS(NGramModel::Deserialize("ngram v1 order=9 discount=0.75\n"),
                  Error);
}

TEST_CASE("corpus perplexity is a count-weighted mean") {
  Corpus train = MakeCorpus({{"red green", 3}, {"blue red", 2}});
  NGramModel model = NGramModel::Train(train, 2, 0.75);

  Corpus single = MakeCorpus({{"red green", 5}});
  CHECK(CorpusPerplexity(model, single) ==
        doctest::Approx(LogPerplexity(model, "red green")).epsilon(1e-12));

  Corpus eval = MakeCorpus({{"red green", 2}, {"blue", 7}});
  Corpus doubled = MakeCorpus({{"red green", 4}, {"blue", 14}});
  CHECK(CorpusPerplexity(model, eval) ==
        doctest::Approx(CorpusPerplexity(model, doubled)).epsilon(1e-12));
  CHECK(CorpusPerplexity(model, eval) ==
        reference::CorpusPerplexity(model, eval));
  CHECK_THROWS_AS(CorpusPerplexity(model, Corpus()), Error);
}

TEST_CASE("domain-matched training data lowers testset perplexity") {
  auto domain_corpus = [](double profile, std::uint64_t seed) {
    ZipfGenSpec spec;
    spec.amplitude = 500;
    spec.alpha = 1.5;
    spec.f_max = 60;
    spec.vocab_size = 150;
    spec.max_len = 7;
    spec.domain_profile = profile;
    spec.seed = seed;
    return GenZipf(spec);
  };
  Corpus target_train = domain_corpus(0.5, 1);
  Corpus background_train = domain_corpus(0.0, 2);
  Corpus target_test = domain_corpus(0.5, 3);  // held out

  NGramModel target_lm = NGramModel::Train(target_train, 3, 0.75);
  NGramModel background_lm = NGramModel::Train(background_train, 3, 0.75);
  CHECK(CorpusPerplexity(target_lm, target_test) <
        CorpusPerplexity(background_lm, target_test));
}
