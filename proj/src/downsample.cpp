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

#include "tailsel/downsample.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "tailsel/rng.hpp"
#include "tailsel/util.hpp"

namespace tailsel {

DownsampleFunction ParseDownsampleFunction(std::string_view name) {
  if (name == "simple-power" || name == "simple_power")
    return DownsampleFunction::kSimplePower;
  if (name == "soft-log" || name == "soft_log")
    return DownsampleFunction::kSoftLog;
  if (name == "pure-log" || name == "pure_log")
    return DownsampleFunction::kPureLog;
  if (name == "dedup") return DownsampleFunction::kDedup;
  if (name == "none") return DownsampleFunction::kNone;
  throw Error("unknown downsampling function: " + std::string(name));
}

std::string DownsampleFunctionName(DownsampleFunction fn) {
  switch (fn) {
    case DownsampleFunction::kSimplePower: return "simple-power";
    case DownsampleFunction::kSoftLog: return "soft-log";
    case DownsampleFunction::kPureLog: return "pure-log";
    case DownsampleFunction::kDedup: return "dedup";
    case DownsampleFunction::kNone: return "none";
  }
  return "?";
}

void ValidateDownsampleSpec(const DownsampleSpec& spec) {
  const bool has_param = spec.paper_param.has_value();
  switch (spec.function) {
    case DownsampleFunction::kSimplePower:
      if (spec.fc.has_value()) {
        throw Error("simple-power does not take fc");
      }
      if (spec.beta.has_value() == has_param) {
        throw Error("simple-power needs exactly one of beta or the convention parameter");
      }
      if (spec.beta.has_value() && *spec.beta <= 0) {
        throw Error("simple-power: beta must be > 0");
      }
      break;
    case DownsampleFunction::kSoftLog:
      if (spec.beta.has_value()) {
        throw Error("soft-log does not take beta");
      }
      if (spec.fc.has_value() == has_param) {
        throw Error("soft-log needs exactly one of fc or the convention parameter");
      }
      if (spec.fc.has_value() && *spec.fc <= 0) {
        throw Error("soft-log: fc must be > 0");
      }
      break;
    default:
      if (spec.beta || spec.fc || has_param) {
        throw Error(DownsampleFunctionName(spec.function) +
                    " takes no parameters");
      }
      break;
  }
  if (has_param && *spec.paper_param < 0) {
    throw Error("convention parameter must be >= 0");
  }
}

DownsampleSpec ResolveParams(const DownsampleSpec& spec,
                             const PowerLawFit& fit) {
  ValidateDownsampleSpec(spec);
  if (!spec.paper_param.has_value()) {
    throw Error("resolve: no convention parameter to resolve");
  }
  if (fit.alpha <= 0) throw Error("resolve: fit alpha must be > 0");
  DownsampleSpec resolved = spec;
  const double p = *spec.paper_param;
  resolved.paper_param.reset();
  if (spec.function == DownsampleFunction::kSimplePower) {
    // the reported convention value is alpha*beta
    resolved.beta = p / fit.alpha;
  } else {
    if (!fit.fr.has_value()) throw Error("resolve: fit has no fr");
    // the reported convention value is log10(fr / fc)
    const double fc = *fit.fr / std::pow(10.0, p);
    if (!(fc > 0)) throw Error("resolve: resulting fc is not positive");
    resolved.fc = fc;
  }
  return resolved;
}

double DownsampleFrequency(const DownsampleSpec& spec, double f0) {
  if (f0 < 0) throw Error("downsample: negative frequency");
  if (spec.NeedsResolution()) {
    throw Error("downsample: unresolved convention parameter");
  }
  switch (spec.function) {
    case DownsampleFunction::kSimplePower:
      return std::pow(f0, *spec.beta);
    case DownsampleFunction::kSoftLog:
      return *spec.fc * std::log1p(f0 / *spec.fc);
    case DownsampleFunction::kPureLog:
      return f0 >= 1.0 ? std::log(f0) : 0.0;
    case DownsampleFunction::kDedup:
      return f0 >= 1.0 ? 1.0 : 0.0;
    case DownsampleFunction::kNone:
      return f0;
  }
  return f0;
}

std::uint64_t RealizeCount(double f1, std::string_view text,
                           std::uint64_t seed) {
  if (f1 < 0) throw Error("realize: negative frequency");
  if (f1 == 0) return 0;
  const double floor_part = std::floor(f1);
  const double frac = f1 - floor_part;
  auto result = static_cast<std::uint64_t>(floor_part);
  if (frac > 0 && HashUnit(seed, text) < frac) ++result;
  return result;
}

Corpus DownsampleCorpus(const Corpus& corpus, const DownsampleSpec& spec,
                        const PowerLawFit* fit, DownsampleReport* report) {
  ValidateDownsampleSpec(spec);
  DownsampleSpec concrete = spec;
  if (spec.NeedsResolution()) {
    if (fit == nullptr) {
      throw Error("downsample: convention parameter given but no fit available");
    }
    concrete = ResolveParams(spec, *fit);
  }

  const auto& records = corpus.records();
  std::vector<std::uint64_t> realized(records.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (concrete.function == DownsampleFunction::kNone) {
      realized[i] = records[i].count;  // exact identity, no float round-trip
    } else {
      const double f1 = DownsampleFrequency(
          concrete, static_cast<double>(records[i].count));
      realized[i] = RealizeCount(f1, records[i].text, concrete.seed);
    }
  }

  std::vector<SentenceRecord> kept;
  kept.reserve(records.size());
  std::uint64_t output_total = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (realized[i] == 0) continue;
    kept.push_back({records[i].text, realized[i]});
    output_total += realized[i];
  }
  if (report != nullptr) {
    report->input_total = corpus.total_count();
    report->output_total = output_total;
    report->reduction_factor =
        output_total == 0
            ? std::numeric_limits<double>::infinity()
            : static_cast<double>(corpus.total_count()) /
                  static_cast<double>(output_total);
    report->resolved_spec = concrete;
  }
  return Corpus::FromRecords(std::move(kept));
}

}  // namespace tailsel
