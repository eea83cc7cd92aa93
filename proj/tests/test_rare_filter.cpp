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

#include <random>
#include <set>
#include <unordered_map>

#include "doctest.h"
#include "tailsel/corpus.hpp"
#include "tailsel/rare_filter.hpp"
#include "tailsel/reference.hpp"
#include "tailsel/stats.hpp"
#include "tailsel/util.hpp"
#include "test_helpers.hpp"

using namespace tailsel;
using testing::MakeCorpus;

namespace {

// deliberately independent reimplementation of the keep rule
std::set<std::string> NaiveKeptSet(const Corpus& corpus,
                                   const Corpus& acoustic,
                                   std::uint64_t threshold) {
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& r : acoustic.records()) {
    for (const auto& tok : Tokenize(r.text)) freq[tok] += r.count;
  }
  std::set<std::string> kept;
  for (const auto& r : corpus.records()) {
    for (const auto& tok : Tokenize(r.text)) {
      const auto it = freq.find(tok);
      const std::uint64_t f = it == freq.end() ? 0 : it->second;
      if (f < threshold) {
        kept.insert(r.text);
        break;
      }
    }
  }
  return kept;
}

std::set<std::string> TextsOf(const Corpus& corpus) {
  std::set<std::string> texts;
  for (const auto& r : corpus.records()) texts.insert(r.text);
  return texts;
}

}  // namespace

TEST_CASE("unigram table weighs tokens by record count") {
  UnigramTable table = BuildUnigramTable(MakeCorpus({{"the weather", 3}}));
  CHECK(table.Frequency("the") == 3);
  CHECK(table.Frequency("weather") == 3);
  CHECK(table.Frequency("absent") == 0);
  CHECK(table.total_tokens() == 6);

  UnigramTable repeated = BuildUnigramTable(MakeCorpus({{"a a", 2}}));
  CHECK(repeated.Frequency("a") == 4);

  CHECK_THROWS_AS(BuildUnigramTable(Corpus()), Error);
}

TEST_CASE("unigram table histogram feeds the stats module") {
  UnigramTable table = BuildUnigramTable(
      MakeCorpus({{"the weather", 3}, {"the maps", 2}, {"konigsberg", 3}}));
  // the:5, weather:3, maps:2, konigsberg:3
  FrequencyHistogram hist = table.Histogram();
  CHECK(hist.bins ==
        std::map<std::uint64_t, std::uint64_t>{{2, 1}, {3, 2}, {5, 1}});
  CHECK(FormatHistogramTsv(hist) == "2\t1\n3\t2\n5\t1\n");
}

TEST_CASE("rare filter keeps sentences with an acoustically rare token") {
  Corpus acoustic = MakeCorpus(
      {{"the weather", 90}, {"the the", 5}, {"konigsberg", 3}});
  // acoustic frequencies: the:100, weather:90, konigsberg:3
  UnigramTable table = BuildUnigramTable(acoustic);
  REQUIRE(table.Frequency("the") == 100);

  Corpus corpus =
      MakeCorpus({{"the weather", 50}, {"turn on konigsberg tv", 2}});
  RareFilterReport report;
  Corpus kept = FilterRare(corpus, table, 15, &report);
  CHECK(TextsOf(kept) == std::set<std::string>{"turn on konigsberg tv"});
  CHECK(kept.records()[0].count == 2);  // counts preserved
  CHECK(report.kept_records == 1);
  CHECK(report.kept_fraction == doctest::Approx(0.5));
}

TEST_CASE("threshold zero keeps nothing") {
  Corpus acoustic = MakeCorpus({{"a b", 1}});
  Corpus corpus = MakeCorpus({{"a", 1}, {"zzz", 5}});
  Corpus kept = FilterRare(corpus, BuildUnigramTable(acoustic), 0);
  CHECK(kept.empty());
}

TEST_CASE("constructed corpus keeps exactly the 37 planted records") {
  // 200 text records; exactly the first 37 carry a token that is rare in
  // the acoustic data (frequency 3 < 15), the rest only common tokens
  std::vector<SentenceRecord> acoustic_records;
  for (int i = 0; i < 40; ++i) {
    acoustic_records.push_back({"common" + std::to_string(i), 50});
  }
  for (int i = 0; i < 40; ++i) {
    acoustic_records.push_back({"rare" + std::to_string(i), 3});
  }
  Corpus acoustic = Corpus::FromRecords(std::move(acoustic_records));
  UnigramTable table = BuildUnigramTable(acoustic);

  std::vector<SentenceRecord> text_records;
  for (int i = 0; i < 200; ++i) {
    std::string text = "common" + std::to_string(i % 40);
    if (i < 37) text += " rare" + std::to_string(i % 40);
    text += " common" + std::to_string((i * 7 + 1) % 40);
    text_records.push_back({text, static_cast<std::uint64_t>(1 + i % 5)});
  }
  Corpus corpus = Corpus::FromRecords(std::move(text_records));

  RareFilterReport report;
  Corpus kept = FilterRare(corpus, table, 15, &report);
  CHECK(report.kept_records == 37);
  CHECK(TextsOf(kept) == NaiveKeptSet(corpus, acoustic, 15));
}

TEST_CASE("rare filter matches the naive oracle exactly") {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<SentenceRecord> acoustic_records;
    const int acoustic_n = 30 + static_cast<int>(gen() % 60);
    for (int i = 0; i < acoustic_n; ++i) {
      std::string text;
      const int len = 1 + static_cast<int>(gen() % 4);
      for (int j = 0; j < len; ++j) {
        if (j > 0) text.push_back(' ');
        text += "w" + std::to_string(gen() % 70);
      }
      acoustic_records.push_back({text, 1 + gen() % 30});
    }
    Corpus acoustic = Corpus::FromRecords(std::move(acoustic_records));
    UnigramTable table = BuildUnigramTable(acoustic);

    std::vector<SentenceRecord> text_records;
    for (int i = 0; i < 1000; ++i) {
      std::string text;
      const int len = 1 + static_cast<int>(gen() % 5);
      for (int j = 0; j < len; ++j) {
        if (j > 0) text.push_back(' ');
        text += "w" + std::to_string(gen() % 90);  // includes OOV tokens
      }
      text_records.push_back({text, 1 + gen() % 9});
    }
    Corpus corpus = Corpus::FromRecords(std::move(text_records));

    const std::uint64_t threshold = gen() % 40;
    Corpus kept = FilterRare(corpus, table, threshold);
    CHECK(TextsOf(kept) == NaiveKeptSet(corpus, acoustic, threshold));
    CHECK(FormatCorpus(kept) ==
          FormatCorpus(reference::FilterRare(corpus, table, threshold)));

    // monotone in the threshold
    Corpus kept_looser = FilterRare(corpus, table, threshold + 10);
    const auto texts = TextsOf(kept);
    const auto texts_looser = TextsOf(kept_looser);
    for (const auto& text : texts) CHECK(texts_looser.count(text) == 1);

    // counts preserved
    for (const auto& r : kept.records()) {
      bool found = false;
      for (const auto& orig : corpus.records()) {
        if (orig.text == r.text) {
          CHECK(orig.count == r.count);
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}
