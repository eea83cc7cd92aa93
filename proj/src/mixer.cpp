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

#include "tailsel/mixer.hpp"

#include <algorithm>
#include <numeric>

#include "tailsel/rng.hpp"
#include "tailsel/util.hpp"

namespace tailsel {
namespace {

// Inversion sampling over the cumulative count array of a corpus in
// canonical order.
class WeightedPicker {
 public:
  explicit WeightedPicker(const Corpus* corpus) : corpus_(corpus) {
    if (corpus == nullptr) return;
    cumulative_.reserve(corpus->records().size());
    std::uint64_t acc = 0;
    for (const auto& r : corpus->records()) {
      acc += r.count;
      cumulative_.push_back(acc);
    }
  }

  const std::string* Pick(double u) const {
    const auto target = static_cast<std::uint64_t>(
        u * static_cast<double>(cumulative_.back()));
    auto it =
        std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const std::size_t idx =
        std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
    return &corpus_->records()[idx].text;
  }

 private:
  const Corpus* corpus_;
  std::vector<std::uint64_t> cumulative_;
};

}  // namespace

std::vector<MixBatch> MixStream(const std::array<const Corpus*, 4>& sources,
                                const MixSpec& spec) {
  const std::uint32_t ratio_sum =
      std::accumulate(spec.ratios.begin(), spec.ratios.end(), 0u);
  if (ratio_sum != 100) throw Error("mix: ratios must sum to 100");
  if (spec.batch_size < 1 || spec.num_batches < 1) {
    throw Error("mix: batch size and batch count must be positive");
  }
  for (std::size_t s = 0; s < 4; ++s) {
    if (spec.ratios[s] > 0 &&
        (sources[s] == nullptr || sources[s]->empty())) {
      throw Error(std::string("mix: source ") + kMixSources[s] +
                  " has a positive ratio but no sentences");
    }
  }

  std::array<WeightedPicker, 4> pickers = {
      WeightedPicker(sources[0]), WeightedPicker(sources[1]),
      WeightedPicker(sources[2]), WeightedPicker(sources[3])};
  std::array<double, 4> cutoffs{};
  double acc = 0;
  for (std::size_t s = 0; s < 4; ++s) {
    acc += static_cast<double>(spec.ratios[s]) / 100.0;
    cutoffs[s] = acc;
  }

  std::vector<MixBatch> batches(spec.num_batches);
#pragma omp parallel for schedule(static)
  for (std::uint64_t b = 0; b < spec.num_batches; ++b) {
    auto& batch = batches[b];
    batch.resize(spec.batch_size);
    for (std::uint64_t slot = 0; slot < spec.batch_size; ++slot) {
      const auto draws = CounterRng::Draw(spec.seed, b, slot);
      const double u_source = ToUnit(draws[0]);
      std::size_t s = 0;
      while (s < 3 && u_source >= cutoffs[s]) ++s;
      batch[slot] = {kMixSources[s], pickers[s].Pick(ToUnit(draws[1]))};
    }
  }
  return batches;
}

std::string FormatMixTsv(const std::vector<MixBatch>& batches) {
  std::string out;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    for (const auto& item : batches[b]) {
      out += std::to_string(b);
      out += '\t';
      out.push_back(item.source);
      out += '\t';
      out += *item.text;
      out += '\n';
    }
  }
  return out;
}

Corpus MaterializeMix(const std::vector<MixBatch>& batches) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& batch : batches) {
    for (const auto& item : batch) ++counts[*item.text];
  }
  return Corpus::FromCountMap(counts);
}

}  // namespace tailsel
