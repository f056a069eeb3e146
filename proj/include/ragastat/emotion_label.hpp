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

#include <array>
#include <optional>
#include <string_view>

namespace ragastat {

/// The closed seven-element label set. Enumerator order is the canonical
/// rank order (descending tempo/variance/MSSD).
enum class EmotionLabel {
  Anger,
  Serenity,
  Romantic,
  Anxiety,
  Devotion,
  Heroic,
  Sorrow,
};

inline constexpr std::array<EmotionLabel, 7> kAllEmotions = {
    EmotionLabel::Anger,   EmotionLabel::Serenity, EmotionLabel::Romantic,
    EmotionLabel::Anxiety, EmotionLabel::Devotion, EmotionLabel::Heroic,
    EmotionLabel::Sorrow,
};

/// Canonical rank, 1 (Anger) through 7 (Sorrow).
int canonical_rank(EmotionLabel label);

/// Inverse of canonical_rank. Throws Error for ranks outside 1..7.
EmotionLabel emotion_from_rank(int rank);

std::string_view to_string(EmotionLabel label);

/// Case-insensitive parse of a canonical label name; nullopt when unknown.
std::optional<EmotionLabel> try_parse_emotion(std::string_view name);

/// Like try_parse_emotion but throws ParseError for unknown names.
EmotionLabel parse_emotion(std::string_view name);

}  // namespace ragastat
