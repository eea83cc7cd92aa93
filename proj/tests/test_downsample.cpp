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
#include <random>
#include <unordered_set>

#include "doctest.h"
#include "tailsel/corpus.hpp"
#include "tailsel/downsample.hpp"
#include "tailsel/reference.hpp"
#include "tailsel/rng.hpp"
#include "tailsel/stats.hpp"
#include "tailsel/util.hpp"
#include "test_helpers.hpp"

using namespace tailsel;
using testing::MakeCorpus;

namespace {

DownsampleSpec SoftLog(double fc, std::uint64_t seed = 0) {
  DownsampleSpec spec;
  spec.function = DownsampleFunction::kSoftLog;
  spec.fc = fc;
  spec.seed = seed;
  return spec;
}

DownsampleSpec SimplePower(double beta, std::uint64_t seed = 0) {
  DownsampleSpec spec;
  spec.function = DownsampleFunction::kSimplePower;
  spec.beta = beta;
  spec.seed = seed;
  return spec;
}

DownsampleSpec Plain(DownsampleFunction fn) {
  DownsampleSpec spec;
  spec.function = fn;
  return spec;
}

}  // namespace

TEST_CASE("convention parameter resolution") {
  PowerLawFit fit;
  fit.alpha = 1.1;  // Play-domain value
  fit.amplitude = 1e6;
  fit.fr = std::pow(fit.amplitude, 1.0 / fit.alpha);

  DownsampleSpec spec;
  spec.function = DownsampleFunction::kSimplePower;
  spec.paper_param = 2.2;
  DownsampleSpec resolved = ResolveParams(spec, fit);
  CHECK(*resolved.beta == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(resolved.paper_param.has_value());

  PowerLawFit fit2;
  fit2.alpha = 2;
  fit2.amplitude = 1e6;
  fit2.fr = 1000;  // A^(1/alpha)
  DownsampleSpec soft;
  soft.function = DownsampleFunction::kSoftLog;
  soft.paper_param = 2;
  CHECK(*ResolveParams(soft, fit2).fc == doctest::Approx(10.0).epsilon(1e-12));
  soft.paper_param = 0;  // SoftLog-0 keeps fc at fr
  CHECK(*ResolveParams(soft, fit2).fc ==
        doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("convention parameter resolution errors") {
  DownsampleSpec soft;
  soft.function = DownsampleFunction::kSoftLog;
  soft.paper_param = 2;

  PowerLawFit no_fr;
  no_fr.alpha = 1.5;
  no_fr.amplitude = 100;
  CHECK_THROWS_AS(ResolveParams(soft, no_fr), Error);

  PowerLawFit bad_alpha;
  bad_alpha.alpha = -1;
  bad_alpha.fr = 10;
  CHECK_THROWS_AS(ResolveParams(soft, bad_alpha), Error);

  DownsampleSpec concrete = SoftLog(5);
  CHECK_THROWS_AS(ResolveParams(concrete, no_fr), Error);
}

TEST_CASE("spec validation") {
  DownsampleSpec both = SimplePower(2);
  both.paper_param = 2;
  CHECK_THROWS_AS(ValidateDownsampleSpec(both), Error);

  DownsampleSpec neither;
  neither.function = DownsampleFunction::kSoftLog;
  CHECK_THROWS_AS(ValidateDownsampleSpec(neither), Error);

  DownsampleSpec stray = Plain(DownsampleFunction::kDedup);
  stray.beta = 1;
  CHECK_THROWS_AS(ValidateDownsampleSpec(stray), Error);
}

TEST_CASE("downsample function values") {
  CHECK(DownsampleFrequency(SoftLog(10), 10) ==
        doctest::Approx(10 * std::log(2.0)).epsilon(1e-12));
  CHECK(DownsampleFrequency(SimplePower(1), 57) == 57);
  CHECK(DownsampleFrequency(SimplePower(0.5), 16) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(DownsampleFrequency(Plain(DownsampleFunction::kDedup), 213) == 1);
  CHECK(DownsampleFrequency(SoftLog(3.7), 0) == 0);
  CHECK(DownsampleFrequency(Plain(DownsampleFunction::kPureLog), 1) == 0);
  CHECK(DownsampleFrequency(Plain(DownsampleFunction::kPureLog), 100) ==
        doctest::Approx(std::log(100.0)));
  CHECK(DownsampleFrequency(Plain(DownsampleFunction::kNone), 8.5) == 8.5);
  CHECK_THROWS_AS(DownsampleFrequency(SoftLog(1), -1), Error);
}

TEST_CASE("downsample functions are monotone and soft log contracts") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> freq(0.0, 1e6);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double f0 = freq(gen);
    const double f1 = freq(gen);
    const double lo = std::min(f0, f1), hi = std::max(f0, f1);
    DownsampleSpec specs[] = {SoftLog(unit(gen) * 1e4),
                              SimplePower(unit(gen) * 3),
                              Plain(DownsampleFunction::kPureLog),
                              Plain(DownsampleFunction::kDedup),
                              Plain(DownsampleFunction::kNone)};
    for (const auto& spec : specs) {
      CHECK(DownsampleFrequency(spec, lo) <= DownsampleFrequency(spec, hi));
    }
    // contraction with equality only at 0, and the low-frequency
    // preservation bound below fc/10
    const double fc = unit(gen) * 1e4;
    const double soft = DownsampleFrequency(SoftLog(fc), lo);
    if (lo > 0) {
      CHECK(soft < lo);
      if (lo < fc / 10) {
        CHECK(std::abs(soft - lo) / lo < lo / (2 * fc));
      }
    } else {
      CHECK(soft == 0);
    }
    // simple power fixes f0 = 1 for every beta
    CHECK(DownsampleFrequency(SimplePower(unit(gen) * 4), 1) == 1);
  }
}

TEST_CASE("soft log caps the head") {
  const double fc = 50;
  const double f_max = 1e6;
  const double cap = fc * std::log1p(f_max / fc);
  for (double f0 : {1.0, 10.0, 1e3, 1e5, f_max}) {
    CHECK(DownsampleFrequency(SoftLog(fc), f0) <= cap);
  }
}

TEST_CASE("realize_count on integers and zero") {
  for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
    CHECK(RealizeCount(4.0, "anything", seed) == 4);
    CHECK(RealizeCount(0.0, "anything", seed) == 0);
  }
}

TEST_CASE("realize_count matches the Bernoulli oracle in expectation") {
  // for each fractional part, the empirical mean over many distinct
  // sentence texts must sit within 4 sigma of f1
  const int n = 10000;
  for (double f1 : {0.25, 0.5, 2.8, 6.1}) {
    const double frac = f1 - std::floor(f1);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      const std::string text = "w" + std::to_string(i % 97) + " w" +
                               std::to_string((i * 13) % 83) + " w" +
                               std::to_string(i);
      sum += static_cast<double>(RealizeCount(f1, text, 99));
    }
    const double mean = sum / n;
    const double sigma = std::sqrt(frac * (1 - frac) / n);
    CHECK(std::abs(mean - f1) <= 4 * sigma);
    if (f1 == 0.25) CHECK(std::abs(mean - 0.25) <= 0.02);
  }
}

TEST_CASE("realize_count follows the published hash contract") {
  // recompute the Bernoulli decision from the normative FNV-1a definition
  std::mt19937 gen(55);
  for (int i = 0; i < 2000; ++i) {
    const std::string text = "t" + std::to_string(gen());
    const std::uint64_t seed = gen();
    const double f1 = static_cast<double>(gen() % 8) + (gen() % 1000) / 1000.0;
    std::uint64_t h = 14695981039346656037ULL;
    for (int b = 0; b < 8; ++b) {
      h = (h ^ ((seed >> (8 * b)) & 0xFF)) * 1099511628211ULL;
    }
    for (unsigned char c : text) h = (h ^ c) * 1099511628211ULL;
    const double u = static_cast<double>(h) * 0x1.0p-64;
    const double frac = f1 - std::floor(f1);
    const std::uint64_t expected =
        static_cast<std::uint64_t>(std::floor(f1)) +
        ((frac > 0 && u < frac) ? 1 : 0);
    CHECK(RealizeCount(f1, text, seed) == expected);
  }
}

TEST_CASE("dedup and identity corpus downsampling") {
  Corpus corpus = MakeCorpus({{"a", 5}, {"b", 1}});
  DownsampleReport report;
  Corpus deduped =
      DownsampleCorpus(corpus, Plain(DownsampleFunction::kDedup), nullptr,
                       &report);
  CHECK(deduped == MakeCorpus({{"a", 1}, {"b", 1}}));
  CHECK(report.reduction_factor == doctest::Approx(3.0));

  Corpus same = DownsampleCorpus(corpus, Plain(DownsampleFunction::kNone),
                                 nullptr, &report);
  CHECK(same == corpus);
  CHECK(report.reduction_factor == doctest::Approx(1.0));
}

TEST_CASE("pure log drops singletons") {
  Corpus corpus = MakeCorpus({{"a", 1}, {"b", 1}, {"c", 100}});
  Corpus out = DownsampleCorpus(corpus, Plain(DownsampleFunction::kPureLog));
  for (const auto& r : out.records()) CHECK(r.text == "c");
}

TEST_CASE("downsampled total matches the histogram expectation oracle") {
  ZipfGenSpec gen_spec;
  gen_spec.amplitude = 2000;
  gen_spec.alpha = 1.3;
  gen_spec.f_max = 500;
  gen_spec.vocab_size = 300;
  gen_spec.max_len = 8;
  gen_spec.seed = 77;
  Corpus corpus = GenZipf(gen_spec);

  DownsampleSpec spec = SoftLog(20, 42);
  DownsampleReport report;
  DownsampleCorpus(corpus, spec, nullptr, &report);

  // exact expectation and variance from the histogram
  double expected = 0, variance = 0;
  for (const auto& [f, distinct] : BuildHistogram(corpus).bins) {
    const double f1 =
        DownsampleFrequency(spec, static_cast<double>(f));
    const double frac = f1 - std::floor(f1);
    expected += static_cast<double>(distinct) * f1;
    variance += static_cast<double>(distinct) * frac * (1 - frac);
  }
  CHECK(std::abs(static_cast<double>(report.output_total) - expected) <=
        4 * std::sqrt(variance) + 1e-9);
}

TEST_CASE("soft log p=2 hits the head much harder than the singletons") {
  ZipfGenSpec gen_spec;
  gen_spec.amplitude = 1e4;
  gen_spec.alpha = 1.3;
  gen_spec.f_max = 1000;
  gen_spec.vocab_size = 500;
  gen_spec.max_len = 8;
  gen_spec.seed = 3;
  gen_spec.head_boost = {{50000, 2}};
  Corpus corpus = GenZipf(gen_spec);
  PowerLawFit fit = FitPowerLaw(BuildHistogram(corpus));

  DownsampleSpec spec;
  spec.function = DownsampleFunction::kSoftLog;
  spec.paper_param = 2;
  spec.seed = 10;
  Corpus out = DownsampleCorpus(corpus, spec, &fit);

  auto max_count = [](const Corpus& c) { return c.records().front().count; };
  auto singletons = [](const Corpus& c) {
    std::uint64_t n = 0;
    for (const auto& r : c.records()) n += r.count == 1;
    return n;
  };
  const double head_reduction =
      static_cast<double>(max_count(corpus)) /
      static_cast<double>(max_count(out));
  const std::uint64_t f1_bin = BuildHistogram(corpus).bins.at(1);
  // singleton records either stay at count 1 or drop out; the kept
  // fraction is fc*ln(1+1/fc) >= ln 2 in expectation, so the reduction in
  // f=1 records stays under 31%
  std::unordered_set<std::string> input_singletons;
  for (const auto& r : corpus.records()) {
    if (r.count == 1) input_singletons.insert(r.text);
  }
  std::uint64_t kept_singletons = 0;
  for (const auto& r : out.records()) {
    kept_singletons += input_singletons.count(r.text);
  }
  const double singleton_reduction =
      static_cast<double>(f1_bin) / static_cast<double>(kept_singletons);
  CHECK(static_cast<double>(f1_bin - kept_singletons) /
            static_cast<double>(f1_bin) <
        0.31);
  CHECK(head_reduction > singleton_reduction);
  CHECK(singletons(out) >= kept_singletons);
}

TEST_CASE("downsampling is deterministic and order independent") {
  ZipfGenSpec gen_spec;
  gen_spec.amplitude = 300;
  gen_spec.alpha = 1.5;
  gen_spec.f_max = 100;
  gen_spec.vocab_size = 200;
  gen_spec.max_len = 6;
  gen_spec.seed = 5;
  Corpus corpus = GenZipf(gen_spec);
  DownsampleSpec spec = SoftLog(7, 1234);

  const std::string once = FormatCorpus(DownsampleCorpus(corpus, spec));
  CHECK(FormatCorpus(DownsampleCorpus(corpus, spec)) == once);
  CHECK(FormatCorpus(reference::DownsampleCorpus(corpus, spec)) == once);

  // shuffled input reaches the same corpus
  std::vector<SentenceRecord> records(corpus.records().begin(),
                                      corpus.records().end());
  std::mt19937 gen(2);
  std::shuffle(records.begin(), records.end(), gen);
  Corpus shuffled = Corpus::FromRecords(std::move(records));
  CHECK(FormatCorpus(DownsampleCorpus(shuffled, spec)) == once);

  // and thread count does not matter
  SetMaxThreads(1);
  const std::string one_thread = FormatCorpus(DownsampleCorpus(corpus, spec));
  SetMaxThreads(8);
  const std::string eight_threads =
      FormatCorpus(DownsampleCorpus(corpus, spec));
  SetMaxThreads(0);
  CHECK(one_thread == once);
  CHECK(eight_threads == once);
}
