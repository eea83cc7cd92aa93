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

#ifndef TAILSEL_STATS_HPP_
#define TAILSEL_STATS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "tailsel/corpus.hpp"

namespace tailsel {

// Maps frequency f to the number of distinct items occurring exactly f
// times.  Empty bins are omitted.
struct FrequencyHistogram {
  std::map<std::uint64_t, std::uint64_t> bins;

  std::uint64_t total_count() const;     // sum of f * bins[f]
  std::uint64_t distinct_count() const;  // sum of bins[f]
  bool operator==(const FrequencyHistogram&) const = default;
};

// Fitted distinct_count(f) ≈ A * f^-alpha, with fr = A^(1/alpha), the
// frequency where the fitted line reaches distinct_count 1.
struct PowerLawFit {
  double amplitude = 0.0;  // A
  double alpha = 0.0;
  std::uint64_t fit_f_min = 0;
  std::uint64_t fit_f_max = 0;
  std::optional<double> fr;  // absent when alpha <= 0
  double residual = 0.0;     // RMS residual, log10 space
};

// bins[f] = number of records with count exactly f.  Errors on an empty
// corpus.
FrequencyHistogram BuildHistogram(const Corpus& corpus);

// Histogram of an arbitrary count collection (e.g. unigram frequencies).
FrequencyHistogram BuildHistogramFromCounts(std::span<const std::uint64_t> counts);

// Ordinary least squares on (log10 f, log10 distinct_count) over bins in
// [f_min, f_max].  When f_max is absent, the upper bound is the largest f
// with distinct_count >= 5, which drops the noisy deviating head.
// Errors on fewer than 2 in-range bins or a degenerate (single-f) range.
PowerLawFit FitPowerLaw(const FrequencyHistogram& hist, std::uint64_t f_min = 1,
                        std::optional<std::uint64_t> f_max = std::nullopt);

// "f<TAB>distinct_count" lines, f ascending.
std::string FormatHistogramTsv(const FrequencyHistogram& hist);
void EmitHistogramTsv(const FrequencyHistogram& hist, const std::string& path);
FrequencyHistogram ReadHistogramTsv(const std::string& path);

// One-line fit rendering, "A=<val> alpha=<val> fr=<val> residual=<val>";
// fr renders as "absent" when missing.  ParseFitLine inverts it.
std::string FormatFitLine(const PowerLawFit& fit);
PowerLawFit ParseFitLine(const std::string& line);

}  // namespace tailsel

#endif  // TAILSEL_STATS_HPP_
