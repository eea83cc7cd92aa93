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

#include "tailsel/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <charconv>
#include <sstream>
#include <vector>

#include "tailsel/util.hpp"

namespace tailsel {

std::uint64_t FrequencyHistogram::total_count() const {
  std::uint64_t total = 0;
  for (const auto& [f, distinct] : bins) total += f * distinct;
  return total;
}

std::uint64_t FrequencyHistogram::distinct_count() const {
  std::uint64_t total = 0;
  for (const auto& [f, distinct] : bins) total += distinct;
  return total;
}

FrequencyHistogram BuildHistogram(const Corpus& corpus) {
  if (corpus.empty()) throw Error("histogram: empty corpus");
  const auto& records = corpus.records();
  const int num_shards = std::max(1, MaxThreads());
  std::vector<std::map<std::uint64_t, std::uint64_t>> shards(num_shards);
#pragma omp parallel num_threads(num_shards)
  {
    auto& local = shards[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < records.size(); ++i) {
      ++local[records[i].count];
    }
  }
  FrequencyHistogram hist;
  for (const auto& shard : shards) {
    for (const auto& [f, distinct] : shard) hist.bins[f] += distinct;
  }
  return hist;
}

FrequencyHistogram BuildHistogramFromCounts(
    std::span<const std::uint64_t> counts) {
  FrequencyHistogram hist;
  for (std::uint64_t c : counts) {
    if (c > 0) ++hist.bins[c];
  }
  return hist;
}

PowerLawFit FitPowerLaw(const FrequencyHistogram& hist, std::uint64_t f_min,
                        std::optional<std::uint64_t> f_max) {
  std::uint64_t upper;
  if (f_max.has_value()) {
    upper = *f_max;
  } else {
    // auto bound: largest f whose bin still holds at least 5 distinct
    // sentences; beyond that the head deviates from the power law and the
    // tiny bins dominate log-space noise.
    upper = 0;
    for (const auto& [f, distinct] : hist.bins) {
      if (distinct >= 5 && f >= f_min) upper = f;
    }
    if (upper == 0) throw Error("fit: no bins with distinct_count >= 5");
  }

  std::vector<std::pair<double, double>> points;  // (log10 f, log10 count)
  for (const auto& [f, distinct] : hist.bins) {
    if (f < f_min || f > upper) continue;
    points.emplace_back(std::log10(static_cast<double>(f)),
                        std::log10(static_cast<double>(distinct)));
  }
  if (points.size() < 2) throw Error("fit: fewer than 2 in-range bins");

  double mean_x = 0, mean_y = 0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(points.size());
  mean_y /= static_cast<double>(points.size());

  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
  }
  if (sxx == 0) throw Error("fit: degenerate range (all f equal)");

  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;

  PowerLawFit fit;
  fit.alpha = -slope;
  fit.amplitude = std::pow(10.0, intercept);
  fit.fit_f_min = f_min;
  fit.fit_f_max = upper;
  if (fit.alpha > 0) {
    fit.fr = std::pow(fit.amplitude, 1.0 / fit.alpha);
  }
  double ss_res = 0;
  for (const auto& [x, y] : points) {
    const double r = y - (intercept + slope * x);
    ss_res += r * r;
  }
  fit.residual = std::sqrt(ss_res / static_cast<double>(points.size()));
  return fit;
}

std::string FormatHistogramTsv(const FrequencyHistogram& hist) {
  std::string out;
  for (const auto& [f, distinct] : hist.bins) {
    out += std::to_string(f);
    out += '\t';
    out += std::to_string(distinct);
    out += '\n';
  }
  return out;
}

void EmitHistogramTsv(const FrequencyHistogram& hist, const std::string& path) {
  WriteFile(path, FormatHistogramTsv(hist));
}

FrequencyHistogram ReadHistogramTsv(const std::string& path) {
  FrequencyHistogram hist;
  const auto lines = ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    std::size_t tab = line.find('\t');
    std::uint64_t f = 0, distinct = 0;
    bool ok = tab != std::string::npos;
    if (ok) {
      auto r1 = std::from_chars(line.data(), line.data() + tab, f);
      auto r2 = std::from_chars(line.data() + tab + 1,
                                line.data() + line.size(), distinct);
      ok = r1.ec == std::errc() && r1.ptr == line.data() + tab &&
           r2.ec == std::errc() && r2.ptr == line.data() + line.size() &&
           f > 0 && distinct > 0;
    }
    if (!ok) {
      throw Error("histogram tsv: malformed line " + std::to_string(i + 1));
    }
    hist.bins[f] += distinct;
  }
  return hist;
}

std::string FormatFitLine(const PowerLawFit& fit) {
  std::string out = "A=" + FormatDouble(fit.amplitude) +
                    " alpha=" + FormatDouble(fit.alpha) + " fr=";
  out += fit.fr.has_value() ? FormatDouble(*fit.fr) : "absent";
  out += " residual=" + FormatDouble(fit.residual);
  return out;
}

PowerLawFit ParseFitLine(const std::string& line) {
  PowerLawFit fit;
  std::istringstream in(line);
  std::string field;
  bool have_a = false, have_alpha = false, have_fr = false, have_res = false;
  while (in >> field) {
    std::size_t eq = field.find('=');
    if (eq == std::string::npos) throw Error("fit line: malformed field");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "fr" && value == "absent") {
      fit.fr.reset();
      have_fr = true;
      continue;
    }
    double parsed = 0;
    try {
      parsed = std::stod(value);
    } catch (const std::exception&) {
      throw Error("fit line: malformed value for " + key);
    }
    if (key == "A") {
      fit.amplitude = parsed;
      have_a = true;
    } else if (key == "alpha") {
      fit.alpha = parsed;
      have_alpha = true;
    } else if (key == "fr") {
      fit.fr = parsed;
      have_fr = true;
    } else if (key == "residual") {
      fit.residual = parsed;
      have_res = true;
    } else {
      throw Error("fit line: unknown field " + key);
    }
  }
  if (!have_a || !have_alpha || !have_fr || !have_res) {
    throw Error("fit line: missing fields");
  }
  return fit;
}

}  // namespace tailsel
