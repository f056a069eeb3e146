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

#include <string>
#include <vector>

#include "ragastat/types.hpp"

// Frame-wise fundamental-frequency extraction by normalized
// autocorrelation with parabolic peak refinement. Frames whose best peak
// falls below the voicing threshold are reported unvoiced with f0 = 0.

namespace ragastat {

struct AudioClip;

struct PitchConfig {
  double f_min_hz = 60.0;
  double f_max_hz = 500.0;
  double frame_ms = 40.0;
  double hop_ms = 10.0;
  double voicing_threshold = 0.45;
};

struct PitchFrame {
  double time_ms = 0.0;
  double f0_hz = 0.0;
  bool voiced = false;
};

struct PitchSequence {
  std::string clip_id;
  double hop_ms = 10.0;
  std::vector<PitchFrame> frames;
};

/// Runs the tracker over a decoded clip. Frame k starts at sample
/// k * hop and is stamped at its start time; the clip must be at least one
/// frame long.
PitchSequence extract_f0(const AudioClip& clip, const PitchConfig& config = {});

/// The f0 values of the voiced frames, in frame order.
ValueArray voiced_values(const PitchSequence& seq);

}  // namespace ragastat
