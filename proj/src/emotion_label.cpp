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

#include "ragastat/emotion_label.hpp"

#include <cctype>
#include <string>

#include "ragastat/types.hpp"

namespace ragastat {

int canonical_rank(EmotionLabel e) { return static_cast<int>(e) + 1; }

EmotionLabel emotion_from_rank(int rank) {
  if (rank < 1 || rank > static_cast<int>(kAllEmotions.size()))
    throw ParseError("emotion_from_rank: rank out of range 1..7");
  return kAllEmotions[static_cast<std::size_t>(rank - 1)];
}

std::string_view to_string(EmotionLabel e) {
  switch (e) {
    case EmotionLabel::Anger: return "Anger";
    case EmotionLabel::Serenity: return "Serenity";
    case EmotionLabel::Romantic: return "Romantic";
    case EmotionLabel::Anxiety: return "Anxiety";
    case EmotionLabel::Devotion: return "Devotion";
    case EmotionLabel::Heroic: return "Heroic";
    case EmotionLabel::Sorrow: return "Sorrow";
  }
  throw Error("to_string: invalid emotion value");
}

std::optional<EmotionLabel> try_parse_emotion(std::string_view text) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = lower(text);
  for (EmotionLabel e : kAllEmotions) {
    if (key == lower(to_string(e))) return e;
  }
  return std::nullopt;
}

EmotionLabel parse_emotion(std::string_view text) {
  auto e = try_parse_emotion(text);
  if (!e) throw ParseError("unknown emotion label: " + std::string(text));
  return *e;
}

}  // namespace ragastat
