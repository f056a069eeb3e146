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
#include <optional>
#include <string>
#include <vector>

#include "ragastat/emotion_label.hpp"
#include "ragastat/pitch_tracker.hpp"
#include "ragastat/types.hpp"

// Ingest boundary: WAV decoding to mono float samples, the dataset manifest
// that labels each clip, and the pitch-track CSV interchange format.

namespace ragastat {

struct AudioClip {
  std::string clip_id;
  int sample_rate = 0;
  ValueArray samples;  // mono, [-1, 1]
  int channel_count_collapsed = 1;
};

/// Decodes a PCM or IEEE-float WAV file. 8/16/24-bit integer and 32-bit
/// float payloads are supported, mono or stereo (stereo is averaged).
/// Anything else is rejected with ParseError.
AudioClip decode_wav(const std::filesystem::path& path);

struct ClipRecord {
  std::string clip_id;
  std::string raga;
  std::vector<EmotionLabel> previous_emotions;  // listener order preserved
  std::optional<EmotionLabel> present_emotion;
  std::optional<std::string> source_path;
};

struct DatasetManifest {
  std::vector<ClipRecord> records;
  std::optional<std::string> signature_source;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest);

/// Pitch CSV: header time_ms,f0_hz,voiced; f0 written with 6 decimals and
/// forced to 0.0 on unvoiced rows.
void save_pitch_csv(const std::filesystem::path& path,
                    const PitchSequence& seq);

/// Inverse of save_pitch_csv. Enforces the header, a constant positive
/// time step, and voiced/f0 consistency.
PitchSequence load_pitch_csv(const std::filesystem::path& path,
                             const std::string& clip_id);

}  // namespace ragastat
