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

#include "ragastat/pitch_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ragastat/audio_ingest.hpp"

namespace ragastat {

namespace {

void validate_config(const PitchConfig& cfg) {
  if (!(cfg.f_min_hz > 0.0) || !(cfg.f_max_hz > cfg.f_min_hz))
    throw Error("pitch config: need 0 < f_min < f_max");
  if (!(cfg.frame_ms > 0.0) || !(cfg.hop_ms > 0.0))
    throw Error("pitch config: frame and hop must be positive");
  if (!(cfg.voicing_threshold > 0.0 && cfg.voicing_threshold < 1.0))
    throw Error("pitch config: voicing threshold must lie in (0, 1)");
}

struct Peak {
  double lag = 0.0;
  double value = 0.0;
};

// Parabolic refinement around an interior sample peak. Offset is clamped
// to half a sample; degenerate curvature keeps the integer peak.
Peak refine(const std::vector<double>& r, Index i, Index lag_min) {
  const double y0 = r[static_cast<std::size_t>(i - 1)];
  const double y1 = r[static_cast<std::size_t>(i)];
  const double y2 = r[static_cast<std::size_t>(i + 1)];
  const double denom = y0 - 2.0 * y1 + y2;
  Peak p;
  p.lag = static_cast<double>(lag_min + i);
  p.value = y1;
  if (denom < 0.0) {
    double delta = 0.5 * (y0 - y2) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    p.lag += delta;
    p.value = y1 - 0.25 * (y0 - y2) * delta;
  }
  return p;
}

}  // namespace

PitchSequence extract_f0(const AudioClip& clip, const PitchConfig& cfg) {
  validate_config(cfg);
  if (clip.sample_rate <= 0) throw Error("extract_f0: invalid sample rate");
  const double sr = static_cast<double>(clip.sample_rate);
  const auto frame_len = static_cast<Index>(std::lround(cfg.frame_ms * sr / 1000.0));
  const auto hop = static_cast<Index>(std::lround(cfg.hop_ms * sr / 1000.0));
  if (frame_len < 16 || hop < 1)
    throw Error("extract_f0: frame or hop too short at this sample rate");
  if (clip.samples.size() < frame_len)
    throw InsufficientData("extract_f0: clip shorter than one frame");

  const Index lag_min =
      std::max<Index>(2, static_cast<Index>(std::floor(sr / cfg.f_max_hz)));
  const Index lag_max = std::min<Index>(
      frame_len - 2, static_cast<Index>(std::ceil(sr / cfg.f_min_hz)));
  if (lag_min >= lag_max)
    throw Error("extract_f0: pitch range unresolvable at this sample rate");

  const Index n_frames = (clip.samples.size() - frame_len) / hop + 1;
  PitchSequence seq;
  seq.clip_id = clip.clip_id;
  seq.hop_ms = cfg.hop_ms;
  seq.frames.reserve(static_cast<std::size_t>(n_frames));

  const Index n_lags = lag_max - lag_min + 1;
  std::vector<double> r(static_cast<std::size_t>(n_lags), 0.0);

  for (Index k = 0; k < n_frames; ++k) {
    PitchFrame out;
    out.time_ms = static_cast<double>(k) * cfg.hop_ms;

    ValueArray frame = clip.samples.segment(k * hop, frame_len);
    frame -= frame.mean();

    // Normalized autocorrelation over the overlap region of each lag.
    bool any_energy = frame.square().sum() > 0.0;
    if (any_energy) {
      for (Index tau = lag_min; tau <= lag_max; ++tau) {
        const Index m = frame_len - tau;
        const double num =
            (frame.head(m) * frame.tail(m)).sum();
        const double e1 = frame.head(m).square().sum();
        const double e2 = frame.tail(m).square().sum();
        const double denom = std::sqrt(e1 * e2);
        r[static_cast<std::size_t>(tau - lag_min)] =
            denom > 0.0 ? num / denom : 0.0;
      }

      std::vector<Peak> peaks;
      for (Index i = 0; i < n_lags; ++i) {
        const double cur = r[static_cast<std::size_t>(i)];
        const bool rises =
            i == 0 || cur >= r[static_cast<std::size_t>(i - 1)];
        const bool falls =
            i == n_lags - 1 || cur >= r[static_cast<std::size_t>(i + 1)];
        if (!(rises && falls)) continue;
        if (i == 0 || i == n_lags - 1) {
          peaks.push_back({static_cast<double>(lag_min + i), cur});
        } else {
          peaks.push_back(refine(r, i, lag_min));
        }
      }

      double best = -1.0;
      for (const Peak& p : peaks) best = std::max(best, p.value);

      if (best >= cfg.voicing_threshold) {
        // Among peaks within 0.01 of the best, the shortest lag wins: a
        // near-tie at a longer lag is the same periodicity seen at a
        // multiple of the true period.
        double lag = 0.0;
        for (const Peak& p : peaks) {
          if (p.value >= best - 0.01 && (lag == 0.0 || p.lag < lag))
            lag = p.lag;
        }
        out.voiced = true;
        out.f0_hz = std::clamp(sr / lag, cfg.f_min_hz, cfg.f_max_hz);
      }
    }
    seq.frames.push_back(out);
  }
  return seq;
}

ValueArray voiced_values(const PitchSequence& seq) {
  std::vector<double> vals;
  vals.reserve(seq.frames.size());
  for (const PitchFrame& f : seq.frames)
    if (f.voiced) vals.push_back(f.f0_hz);
  return Eigen::Map<const ValueArray>(vals.data(),
                                      static_cast<Index>(vals.size()));
}

}  // namespace ragastat
