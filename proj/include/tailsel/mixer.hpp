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

#ifndef TAILSEL_MIXER_HPP_
#define TAILSEL_MIXER_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tailsel/corpus.hpp"

namespace tailsel {

inline constexpr std::array<char, 4> kMixSources = {'D', 'A', 'R', 'C'};

// Minibatch sampling ratios over the four sources: Downsampled, Acoustic
// transcripts, Rare-filtered, Contrastive-filtered.  Integer percentages
// summing to 100.
struct MixSpec {
  std::array<std::uint32_t, 4> ratios = {100, 0, 0, 0};  // D, A, R, C
  std::uint64_t batch_size = 1;
  std::uint64_t num_batches = 1;
  std::uint64_t seed = 0;
};

struct MixItem {
  char source = '?';
  const std::string* text = nullptr;  // borrowed from the source corpus
};
using MixBatch = std::vector<MixItem>;

// Emits num_batches batches of batch_size sentences.  Each slot draws its
// source from a categorical over ratios/100 and then a sentence from that
// source, occurrence-weighted with replacement.  Both draws come from a
// counter RNG keyed by (seed, batch, slot), so batches can be generated
// in parallel and the stream is identical for every thread count.
std::vector<MixBatch> MixStream(const std::array<const Corpus*, 4>& sources,
                                const MixSpec& spec);

// "batch_index<TAB>source<TAB>text" lines.
std::string FormatMixTsv(const std::vector<MixBatch>& batches);

// Occurrence counts of the emitted stream, as a corpus (used to train an
// LM on exactly what the mixer would feed it).
Corpus MaterializeMix(const std::vector<MixBatch>& batches);

}  // namespace tailsel

#endif  // TAILSEL_MIXER_HPP_
