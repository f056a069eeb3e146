// Copyright 2026 The ragastat Authors
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

#pragma once

#include <filesystem>
#include <vector>

#include "ragastat/pitch_tracker.hpp"
#include "ragastat/types.hpp"

// Steady-state detection over a pitch track: maximal runs of consecutive
// voiced frames that stay within a relative band around their running mean.
// The per-second count of such runs is the melodic tempo proxy.

namespace ragastat {

struct SteadyConfig {
  double band_fraction = 0.025;
  Index min_len_frames = 6;
};

struct SteadySegment {
  double start_ms = 0.0;
  double end_ms = 0.0;
  double mean_f0 = 0.0;
  Index length_frames = 0;
};

/// Greedy left-to-right segmentation. A frame joins the open segment when
/// its f0 is within band_fraction of the segment's running mean; an
/// unvoiced frame or a band miss closes it. Segments shorter than
/// min_len_frames are dropped.
std::vector<SteadySegment> detect_steady_states(const PitchSequence& seq,
                                                const SteadyConfig& config = {});

/// Steady-state count per voiced second across one or more clips.
/// Throws if there are no voiced frames at all.
double tempo(const std::vector<PitchSequence>& seqs,
             const SteadyConfig& config = {});

/// CSV with header start_ms,end_ms,mean_f0,length_frames.
void write_segments_csv(const std::filesystem::path& path,
                        const std::vector<SteadySegment>& segments);

}  // namespace ragastat
