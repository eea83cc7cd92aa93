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

#ifndef TAILSEL_DOWNSAMPLE_HPP_
#define TAILSEL_DOWNSAMPLE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tailsel/corpus.hpp"
#include "tailsel/stats.hpp"

namespace tailsel {

enum class DownsampleFunction { kSimplePower, kSoftLog, kPureLog, kDedup, kNone };

// simple_power: f1 = f0^beta.  soft_log: f1 = fc * ln(1 + f0/fc), linear
// below fc and logarithmic above.  pure_log: f1 = ln f0 (f0 >= 1).
// dedup: f1 = 1.  none: identity.
//
// Instead of beta/fc, a convention parameter p may be given and resolved
// against a power-law fit: beta = p / alpha, fc = fr / 10^p.
struct DownsampleSpec {
  DownsampleFunction function = DownsampleFunction::kNone;
  std::optional<double> beta;         // simple_power only
  std::optional<double> fc;           // soft_log only
  std::optional<double> paper_param;  // alternative to beta/fc
  std::uint64_t seed = 0;

  bool NeedsResolution() const { return paper_param.has_value(); }
};

DownsampleFunction ParseDownsampleFunction(std::string_view name);
std::string DownsampleFunctionName(DownsampleFunction fn);

// Validates the beta/fc/paper_param combination for the chosen function.
void ValidateDownsampleSpec(const DownsampleSpec& spec);

// Resolves paper_param into a concrete beta or fc.  Requires alpha > 0 and,
// for soft_log, a present fr.
DownsampleSpec ResolveParams(const DownsampleSpec& spec, const PowerLawFit& fit);

// Maps an original frequency to its downsampled (possibly fractional)
// frequency.  The spec must be concrete (no pending paper_param).
double DownsampleFrequency(const DownsampleSpec& spec, double f0);

// Realizes a fractional frequency as floor(f1) plus a Bernoulli(frac(f1))
// increment keyed on a stable hash of (seed, text): unbiased, independent
// of processing order, and reproducible across shard counts.
std::uint64_t RealizeCount(double f1, std::string_view text, std::uint64_t seed);

struct DownsampleReport {
  std::uint64_t input_total = 0;
  std::uint64_t output_total = 0;
  double reduction_factor = 0.0;  // input_total / output_total
  DownsampleSpec resolved_spec;   // concrete parameters actually applied
};

// Maps every record count through DownsampleFrequency + RealizeCount and
// drops records that realize 0.  `fit` is only consulted when the spec
// still carries a paper_param.
Corpus DownsampleCorpus(const Corpus& corpus, const DownsampleSpec& spec,
                        const PowerLawFit* fit = nullptr,
                        DownsampleReport* report = nullptr);

}  // namespace tailsel

#endif  // TAILSEL_DOWNSAMPLE_HPP_
