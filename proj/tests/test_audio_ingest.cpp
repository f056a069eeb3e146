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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "ragastat/audio_ingest.hpp"
#include "ragastat/io_util.hpp"
#include "support/test_util.hpp"
#include "support/wav_writer.hpp"

using namespace ragastat;
using ragastat::testing::TempDir;
using ragastat::testing::WavCodec;
using ragastat::testing::WavSpec;

namespace {

std::vector<double> sine(double hz, int n, int sr, double amp = 0.5) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        amp * std::sin(2.0 * std::numbers::pi * hz * i / sr);
  return out;
}

}  // namespace

TEST_CASE("16-bit mono wav round trip") {
  TempDir dir("wav16");
  const auto path = dir.path() / "tone.wav";
  const auto samples = sine(220.0, 4410, 44100);
  ragastat::testing::write_wav(path, samples, WavSpec{});

  const AudioClip clip = decode_wav(path);
  CHECK(clip.clip_id == "tone");
  CHECK(clip.sample_rate == 44100);
  CHECK(clip.channel_count_collapsed == 1);
  REQUIRE(clip.samples.size() == 4410);
  for (Index i = 0; i < clip.samples.size(); ++i)
    CHECK(std::fabs(clip.samples[i] - samples[static_cast<std::size_t>(i)]) <=
          1.0 / 32768.0);
}

TEST_CASE("8-bit decoding is centered on 128") {
  TempDir dir("wav8");
  const auto path = dir.path() / "steps.wav";
  WavSpec spec;
  spec.codec = WavCodec::Pcm8;
  ragastat::testing::write_wav(path, {-1.0, 0.0, 127.0 / 128.0}, spec);
  const AudioClip clip = decode_wav(path);
  REQUIRE(clip.samples.size() == 3);
  CHECK(clip.samples[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(clip.samples[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(clip.samples[2] == doctest::Approx(127.0 / 128.0).epsilon(1e-12));
}

TEST_CASE("24-bit decoding keeps fine resolution") {
  TempDir dir("wav24");
  const auto path = dir.path() / "fine.wav";
  WavSpec spec;
  spec.codec = WavCodec::Pcm24;
  const auto samples = sine(100.0, 2000, 8000, 0.9);
  ragastat::testing::write_wav(path, samples, spec);
  const AudioClip clip = decode_wav(path);
  REQUIRE(clip.samples.size() == 2000);
  for (Index i = 0; i < clip.samples.size(); ++i)
    CHECK(std::fabs(clip.samples[i] - samples[static_cast<std::size_t>(i)]) <=
          1.0 / 8388608.0);
}

TEST_CASE("float32 decoding clamps out-of-range values") {
  TempDir dir("wavf32");
  const auto path = dir.path() / "float.wav";
  WavSpec spec;
  spec.codec = WavCodec::Float32;
  spec.clamp_samples = false;
  ragastat::testing::write_wav(path, {0.25, -0.5, 1.5, -2.0}, spec);
  const AudioClip clip = decode_wav(path);
  REQUIRE(clip.samples.size() == 4);
  CHECK(clip.samples[0] == 0.25);
  CHECK(clip.samples[1] == -0.5);
  CHECK(clip.samples[2] == 1.0);
  CHECK(clip.samples[3] == -1.0);
}

TEST_CASE("stereo channels are averaged") {
  TempDir dir("wavst");
  const auto path = dir.path() / "stereo.wav";
  WavSpec spec;
  spec.channels = 2;
  // Interleaved L/R: constant 0.5 left, -0.25 right.
  std::vector<double> interleaved;
  for (int i = 0; i < 100; ++i) {
    interleaved.push_back(0.5);
    interleaved.push_back(-0.25);
  }
  ragastat::testing::write_wav(path, interleaved, spec);
  const AudioClip clip = decode_wav(path);
  CHECK(clip.channel_count_collapsed == 2);
  REQUIRE(clip.samples.size() == 100);
  for (Index i = 0; i < clip.samples.size(); ++i)
    CHECK(clip.samples[i] == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("extensible header resolves to the inner codec") {
  TempDir dir("wavext");
  const auto path = dir.path() / "ext.wav";
  WavSpec spec;
  spec.extensible = true;
  const auto samples = sine(150.0, 1000, 16000);
  ragastat::testing::write_wav(path, samples, spec);
  const AudioClip clip = decode_wav(path);
  REQUIRE(clip.samples.size() == 1000);
  CHECK(std::fabs(clip.samples[10] - samples[10]) <= 1.0 / 32768.0);
}

TEST_CASE("unknown chunks before data are skipped") {
  TempDir dir("wavchunk");
  const auto path = dir.path() / "listed.wav";
  WavSpec spec;
  spec.extra_chunk_id = "LIST";
  spec.extra_chunk_payload = std::string("INFOsoftware tag") + '\0';
  const auto samples = sine(200.0, 500, 8000);
  ragastat::testing::write_wav(path, samples, spec);
  CHECK(decode_wav(path).samples.size() == 500);
}

TEST_CASE("malformed wav files are rejected") {
  TempDir dir("wavbad");

  const auto not_riff = dir.path() / "not_riff.wav";
  ragastat::testing::write_bytes(not_riff, "JUNKDATA.....");
  CHECK_THROWS_AS(decode_wav(not_riff), ParseError);

  // Three channels.
  WavSpec three;
  three.channels = 3;
  const auto tri = dir.path() / "three.wav";
  ragastat::testing::write_wav(tri, std::vector<double>(300, 0.1), three);
  CHECK_THROWS_AS(decode_wav(tri), ParseError);

  // Unsupported codec id (GSM = 0x0031) spliced into a valid file.
  std::string gsm = ragastat::testing::wav_bytes(sine(100.0, 100, 8000), WavSpec{});
  gsm[20] = 0x31;
  const auto gsm_path = dir.path() / "gsm.wav";
  ragastat::testing::write_bytes(gsm_path, gsm);
  CHECK_THROWS_AS(decode_wav(gsm_path), ParseError);

  // Truncated data chunk.
  std::string cut = ragastat::testing::wav_bytes(sine(100.0, 100, 8000), WavSpec{});
  cut.resize(cut.size() - 50);
  const auto cut_path = dir.path() / "cut.wav";
  ragastat::testing::write_bytes(cut_path, cut);
  CHECK_THROWS_AS(decode_wav(cut_path), ParseError);

  // Empty data chunk.
  const auto empty_path = dir.path() / "empty.wav";
  ragastat::testing::write_wav(empty_path, {}, WavSpec{});
  CHECK_THROWS_AS(decode_wav(empty_path), ParseError);

  CHECK_THROWS_AS(decode_wav(dir.path() / "missing.wav"), IoError);
}

TEST_CASE("manifest round trip preserves every field") {
  TempDir dir("manifest");
  const auto path = dir.path() / "manifest.json";

  DatasetManifest m;
  m.signature_source = "store/signatures.json";
  ClipRecord full;
  full.clip_id = "clip_01";
  full.raga = "Bhairav";
  full.previous_emotions = {EmotionLabel::Anger, EmotionLabel::Serenity,
                            EmotionLabel::Devotion, EmotionLabel::Sorrow};
  full.present_emotion = EmotionLabel::Anxiety;
  full.source_path = "pitch/clip_01.csv";
  ClipRecord sparse;
  sparse.clip_id = "clip_02";
  sparse.raga = "Chayanat";
  sparse.previous_emotions = {EmotionLabel::Romantic};
  m.records = {full, sparse};

  save_manifest(path, m);
  const DatasetManifest back = load_manifest(path);
  CHECK(back.signature_source == m.signature_source);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].clip_id == "clip_01");
  CHECK(back.records[0].raga == "Bhairav");
  CHECK(back.records[0].previous_emotions == full.previous_emotions);
  CHECK(back.records[0].present_emotion == EmotionLabel::Anxiety);
  CHECK(back.records[0].source_path == full.source_path);
  CHECK(back.records[1].present_emotion == std::nullopt);
  CHECK(back.records[1].source_path == std::nullopt);
}

TEST_CASE("manifest labels parse case-insensitively") {
  TempDir dir("manifest_ci");
  const auto path = dir.path() / "m.json";
  write_file_atomic(path, R"({"records": [{
    "clip_id": "c", "raga": "Kedar",
    "previous_emotions": ["serenity", "ROMANTIC"],
    "present_emotion": "sorrow", "source_path": null}]})");
  const DatasetManifest m = load_manifest(path);
  CHECK(m.records[0].previous_emotions ==
        std::vector<EmotionLabel>{EmotionLabel::Serenity,
                                  EmotionLabel::Romantic});
  CHECK(m.records[0].present_emotion == EmotionLabel::Sorrow);
}

TEST_CASE("manifest validation errors") {
  TempDir dir("manifest_bad");
  const auto path = dir.path() / "m.json";

  write_file_atomic(path, "{not json");
  CHECK_THROWS_AS(load_manifest(path), ParseError);

  write_file_atomic(path, R"({"rows": []})");
  CHECK_THROWS_AS(load_manifest(path), ParseError);

  write_file_atomic(path, R"({"records": [{
    "clip_id": "c", "raga": "R",
    "previous_emotions": ["Gloom"], "present_emotion": null}]})");
  CHECK_THROWS_AS(load_manifest(path), ParseError);

  // Labeled present with empty previous: reserved for probe clips only.
  write_file_atomic(path, R"({"records": [{
    "clip_id": "c", "raga": "R",
    "previous_emotions": [], "present_emotion": "Anger"}]})");
  CHECK_THROWS_AS(load_manifest(path), ParseError);

  // Probe record: empty previous with null present is fine.
  write_file_atomic(path, R"({"records": [{
    "clip_id": "probe", "raga": "R",
    "previous_emotions": [], "present_emotion": null}]})");
  CHECK(load_manifest(path).records[0].previous_emotions.empty());
}

TEST_CASE("pitch csv round trip") {
  TempDir dir("pitch_csv");
  const auto path = dir.path() / "clip.csv";
  PitchSequence seq;
  seq.clip_id = "clip";
  seq.hop_ms = 10.0;
  seq.frames = {{0.0, 219.954321, true},
                {10.0, 0.0, false},
                {20.0, 220.5, true},
                {30.0, 0.0, false}};
  save_pitch_csv(path, seq);

  const PitchSequence back = load_pitch_csv(path, "clip");
  CHECK(back.clip_id == "clip");
  CHECK(back.hop_ms == 10.0);
  REQUIRE(back.frames.size() == 4);
  CHECK(back.frames[0].f0_hz == doctest::Approx(219.954321).epsilon(1e-9));
  CHECK(back.frames[0].voiced);
  CHECK_FALSE(back.frames[1].voiced);
  CHECK(back.frames[1].f0_hz == 0.0);
  CHECK(back.frames[2].f0_hz == doctest::Approx(220.5).epsilon(1e-12));
}

TEST_CASE("pitch csv format is exact") {
  TempDir dir("pitch_fmt");
  const auto path = dir.path() / "clip.csv";
  PitchSequence seq;
  seq.hop_ms = 10.0;
  // Unvoiced rows must serialize f0 as zero regardless of the field value.
  seq.frames = {{0.0, 200.0, true}, {10.0, 123.0, false}};
  save_pitch_csv(path, seq);

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "time_ms,f0_hz,voiced");
  std::getline(in, line);
  CHECK(line == "0.000,200.000000,1");
  std::getline(in, line);
  CHECK(line == "10.000,0.000000,0");
}

TEST_CASE("pitch csv validation errors") {
  TempDir dir("pitch_bad");
  const auto path = dir.path() / "bad.csv";

  write_file_atomic(path, "time,f0,voiced\n0.0,100.0,1\n");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);

  write_file_atomic(path, "time_ms,f0_hz,voiced\n0.0,100.0,2\n");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);

  // Voiced row with zero f0.
  write_file_atomic(path, "time_ms,f0_hz,voiced\n0.0,0.0,1\n");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);

  // Unvoiced row with nonzero f0.
  write_file_atomic(path, "time_ms,f0_hz,voiced\n0.0,50.0,0\n");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);

  // Uneven time step.
  write_file_atomic(path,
                    "time_ms,f0_hz,voiced\n0.0,100.0,1\n10.0,100.0,1\n25.0,100.0,1\n");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);

  // Decreasing time.
  write_file_atomic(path, "time_ms,f0_hz,voiced\n10.0,100.0,1\n0.0,100.0,1\n");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);

  // Number garbage.
  write_file_atomic(path, "time_ms,f0_hz,voiced\nzero,100.0,1\n");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);

  write_file_atomic(path, "");
  CHECK_THROWS_AS(load_pitch_csv(path, "c"), ParseError);
}

TEST_CASE("atomic write leaves no temp file behind") {
  TempDir dir("atomic");
  const auto path = dir.path() / "out.txt";
  write_file_atomic(path, "payload");
  CHECK(read_file(path) == "payload");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}
