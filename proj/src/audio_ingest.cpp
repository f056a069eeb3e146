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

#include "ragastat/audio_ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "json.hpp"
#include "ragastat/io_util.hpp"

namespace ragastat {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatIeeeFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;

  bool remaining(std::size_t n) const { return buf.size() - pos >= n; }

  std::uint32_t u32() {
    if (!remaining(4)) throw ParseError("wav: truncated file");
    std::uint32_t v;
    std::memcpy(&v, buf.data() + pos, 4);
    pos += 4;
    return v;  // little-endian host assumed; WAV is little-endian
  }

  std::uint16_t u16() {
    if (!remaining(2)) throw ParseError("wav: truncated file");
    std::uint16_t v;
    std::memcpy(&v, buf.data() + pos, 2);
    pos += 2;
    return v;
  }

  std::string tag() {
    if (!remaining(4)) throw ParseError("wav: truncated file");
    std::string t = buf.substr(pos, 4);
    pos += 4;
    return t;
  }

  void skip(std::size_t n) {
    if (!remaining(n)) throw ParseError("wav: truncated chunk");
    pos += n;
  }
};

struct WavFormat {
  std::uint16_t code = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const char* p, const WavFormat& fmt) {
  switch (fmt.bits) {
    case 8: {
      const auto v = static_cast<std::uint8_t>(*p);
      return (static_cast<double>(v) - 128.0) / 128.0;
    }
    case 16: {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<double>(v) / 32768.0;
    }
    case 24: {
      const auto b0 = static_cast<std::uint8_t>(p[0]);
      const auto b1 = static_cast<std::uint8_t>(p[1]);
      const auto b2 = static_cast<std::uint8_t>(p[2]);
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(b2) << 16) |
          (static_cast<std::uint32_t>(b1) << 8) | b0);
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign-extend
      return static_cast<double>(v) / 8388608.0;
    }
    case 32: {
      float v;
      std::memcpy(&v, p, 4);
      const double d = static_cast<double>(v);
      return std::clamp(d, -1.0, 1.0);
    }
    default:
      throw ParseError("wav: unsupported bit depth");
  }
}

}  // namespace

AudioClip decode_wav(const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little,
                "WAV decoding assumes a little-endian host");
  const std::string bytes = read_file(path);
  ByteReader r{bytes};

  if (r.tag() != "RIFF") throw ParseError("wav: missing RIFF header");
  r.u32();  // declared size, unreliable in the wild; chunk walk governs
  if (r.tag() != "WAVE") throw ParseError("wav: not a WAVE file");

  WavFormat fmt;
  bool have_fmt = false;
  std::size_t data_pos = 0;
  std::size_t data_len = 0;

  while (r.remaining(8)) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw ParseError("wav: fmt chunk too small");
      const std::size_t chunk_start = r.pos;
      fmt.code = r.u16();
      fmt.channels = r.u16();
      fmt.sample_rate = r.u32();
      r.u32();  // byte rate
      r.u16();  // block align
      fmt.bits = r.u16();
      if (fmt.code == kFormatExtensible) {
        if (size < 40) throw ParseError("wav: extensible fmt chunk too small");
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        fmt.code = r.u16();  // first two GUID bytes carry the format code
      }
      r.pos = chunk_start;
      r.skip(size);
      have_fmt = true;
    } else if (id == "data") {
      data_pos = r.pos;
      data_len = size;
      if (!r.remaining(size)) throw ParseError("wav: data chunk truncated");
      r.skip(size);
    } else {
      r.skip(size);
    }
    if (size % 2 == 1 && r.remaining(1)) r.skip(1);  // chunks are word-aligned
  }

  if (!have_fmt) throw ParseError("wav: no fmt chunk");
  if (data_len == 0) throw ParseError("wav: empty data chunk");
  if (fmt.code != kFormatPcm && fmt.code != kFormatIeeeFloat)
    throw ParseError("wav: unsupported codec (PCM and float only)");
  if (fmt.code == kFormatPcm &&
      (fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24))
    throw ParseError("wav: unsupported PCM bit depth");
  if (fmt.code == kFormatIeeeFloat && fmt.bits != 32)
    throw ParseError("wav: unsupported float bit depth");
  if (fmt.channels < 1 || fmt.channels > 2)
    throw ParseError("wav: only mono and stereo are supported");
  if (fmt.sample_rate == 0) throw ParseError("wav: zero sample rate");

  const std::size_t bytes_per_sample = fmt.bits / 8u;
  const std::size_t stride = bytes_per_sample * fmt.channels;
  const std::size_t n_frames = data_len / stride;
  if (n_frames == 0) throw ParseError("wav: no complete sample frames");

  AudioClip clip;
  clip.clip_id = path.stem().string();
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.channel_count_collapsed = fmt.channels;
  clip.samples.resize(static_cast<Index>(n_frames));

  const char* base = bytes.data() + data_pos;
  for (std::size_t i = 0; i < n_frames; ++i) {
    const char* p = base + i * stride;
    double v = decode_sample(p, fmt);
    if (fmt.channels == 2)
      v = 0.5 * (v + decode_sample(p + bytes_per_sample, fmt));
    clip.samples[static_cast<Index>(i)] = v;
  }
  return clip;
}

namespace {

using nlohmann::json;

EmotionLabel emotion_from_json(const json& j, const char* context) {
  if (!j.is_string())
    throw ParseError(std::string("manifest: ") + context + " must be a string");
  return parse_emotion(j.get<std::string>());
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("manifest: invalid JSON in " + path.string() + ": " +
                     e.what());
  }
  if (!doc.is_object() || !doc.contains("records") ||
      !doc["records"].is_array())
    throw ParseError("manifest: top-level `records` array required");

  DatasetManifest m;
  if (doc.contains("signature_source") && !doc["signature_source"].is_null()) {
    if (!doc["signature_source"].is_string())
      throw ParseError("manifest: signature_source must be a string path");
    m.signature_source = doc["signature_source"].get<std::string>();
  }

  for (const json& rec : doc["records"]) {
    if (!rec.is_object()) throw ParseError("manifest: record must be an object");
    ClipRecord c;
    if (!rec.contains("clip_id") || !rec["clip_id"].is_string())
      throw ParseError("manifest: record needs a string clip_id");
    c.clip_id = rec["clip_id"].get<std::string>();
    if (!rec.contains("raga") || !rec["raga"].is_string())
      throw ParseError("manifest: record needs a string raga");
    c.raga = rec["raga"].get<std::string>();
    if (!rec.contains("previous_emotions") ||
        !rec["previous_emotions"].is_array())
      throw ParseError("manifest: record needs a previous_emotions array");
    for (const json& e : rec["previous_emotions"])
      c.previous_emotions.push_back(emotion_from_json(e, "previous emotion"));
    if (rec.contains("present_emotion") && !rec["present_emotion"].is_null())
      c.present_emotion = emotion_from_json(rec["present_emotion"],
                                            "present emotion");
    if (rec.contains("source_path") && !rec["source_path"].is_null()) {
      if (!rec["source_path"].is_string())
        throw ParseError("manifest: source_path must be a string or null");
      c.source_path = rec["source_path"].get<std::string>();
    }
    if (c.previous_emotions.empty() && c.present_emotion.has_value())
      throw ParseError(
          "manifest: empty previous_emotions is reserved for unlabeled probe "
          "clips (clip " + c.clip_id + ")");
    m.records.push_back(std::move(c));
  }
  return m;
}

void save_manifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest) {
  json doc;
  doc["records"] = json::array();
  for (const ClipRecord& c : manifest.records) {
    json rec;
    rec["clip_id"] = c.clip_id;
    rec["raga"] = c.raga;
    rec["previous_emotions"] = json::array();
    for (EmotionLabel e : c.previous_emotions)
      rec["previous_emotions"].push_back(std::string(to_string(e)));
    rec["present_emotion"] =
        c.present_emotion ? json(std::string(to_string(*c.present_emotion)))
                          : json(nullptr);
    rec["source_path"] = c.source_path ? json(*c.source_path) : json(nullptr);
    doc["records"].push_back(std::move(rec));
  }
  if (manifest.signature_source)
    doc["signature_source"] = *manifest.signature_source;
  write_file_atomic(path, doc.dump(2) + "\n");
}

void save_pitch_csv(const std::filesystem::path& path,
                    const PitchSequence& seq) {
  std::ostringstream csv;
  csv << "time_ms,f0_hz,voiced\n";
  csv.setf(std::ios::fixed);
  for (const PitchFrame& f : seq.frames) {
    csv.precision(3);
    csv << f.time_ms << ',';
    csv.precision(6);
    csv << (f.voiced ? f.f0_hz : 0.0) << ',' << (f.voiced ? 1 : 0) << '\n';
  }
  write_file_atomic(path, csv.str());
}

namespace {

double parse_double_field(const std::string& s, const char* what,
                          const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("pitch csv " + path.string() + ": bad " + what +
                     " value '" + s + "'");
  }
}

}  // namespace

PitchSequence load_pitch_csv(const std::filesystem::path& path,
                             const std::string& clip_id) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("pitch csv " + path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_ms,f0_hz,voiced")
    throw ParseError("pitch csv " + path.string() +
                     ": header must be time_ms,f0_hz,voiced");

  PitchSequence seq;
  seq.clip_id = clip_id;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_s, f_s, v_s;
    if (!std::getline(row, t_s, ',') || !std::getline(row, f_s, ',') ||
        !std::getline(row, v_s))
      throw ParseError("pitch csv " + path.string() + ": malformed row '" +
                       line + "'");
    PitchFrame f;
    f.time_ms = parse_double_field(t_s, "time_ms", path);
    f.f0_hz = parse_double_field(f_s, "f0_hz", path);
    if (v_s == "1")
      f.voiced = true;
    else if (v_s == "0")
      f.voiced = false;
    else
      throw ParseError("pitch csv " + path.string() + ": voiced must be 0 or 1");
    if (f.voiced && !(f.f0_hz > 0.0))
      throw ParseError("pitch csv " + path.string() +
                       ": voiced row with non-positive f0");
    if (!f.voiced && f.f0_hz != 0.0)
      throw ParseError("pitch csv " + path.string() +
                       ": unvoiced row with nonzero f0");
    seq.frames.push_back(f);
  }

  if (seq.frames.size() >= 2) {
    const double step = seq.frames[1].time_ms - seq.frames[0].time_ms;
    if (!(step > 0.0))
      throw ParseError("pitch csv " + path.string() +
                       ": time_ms must be strictly increasing");
    for (std::size_t i = 2; i < seq.frames.size(); ++i) {
      const double d = seq.frames[i].time_ms - seq.frames[i - 1].time_ms;
      if (std::fabs(d - step) > 1e-6)
        throw ParseError("pitch csv " + path.string() +
                         ": time step must be constant");
    }
    seq.hop_ms = step;
  }
  return seq;
}

}  // namespace ragastat
