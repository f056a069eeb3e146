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

#include "ragastat/steady_state.hpp"

#include <cmath>
#include <sstream>

#include "ragastat/io_util.hpp"

namespace ragastat {

namespace {

void validate_config(const SteadyConfig& cfg) {
  if (!(cfg.band_fraction > 0.0 && cfg.band_fraction < 1.0))
    throw Error("steady config: band fraction must lie in (0, 1)");
  if (cfg.min_len_frames < 2)
    throw Error("steady config: minimum length must be at least 2 frames");
}

}  // namespace

std::vector<SteadySegment> detect_steady_states(const PitchSequence& seq,
                                                const SteadyConfig& cfg) {
  validate_config(cfg);
  std::vector<SteadySegment> out;

  Index run_start = -1;   // index into seq.frames, -1 when no open run
  Index run_len = 0;
  double run_sum = 0.0;

  auto close = [&]() {
    if (run_start >= 0 && run_len >= cfg.min_len_frames) {
      SteadySegment s;
      s.start_ms = seq.frames[static_cast<std::size_t>(run_start)].time_ms;
      s.end_ms =
          seq.frames[static_cast<std::size_t>(run_start + run_len - 1)].time_ms +
          seq.hop_ms;
      s.mean_f0 = run_sum / static_cast<double>(run_len);
      s.length_frames = run_len;
      out.push_back(s);
    }
    run_start = -1;
    run_len = 0;
    run_sum = 0.0;
  };

  for (Index i = 0; i < static_cast<Index>(seq.frames.size()); ++i) {
    const PitchFrame& f = seq.frames[static_cast<std::size_t>(i)];
    if (!f.voiced) {
      close();
      continue;
    }
    if (run_start < 0) {
      run_start = i;
      run_len = 1;
      run_sum = f.f0_hz;
      continue;
    }
    const double mean = run_sum / static_cast<double>(run_len);
    if (std::fabs(f.f0_hz - mean) <= cfg.band_fraction * mean) {
      run_len += 1;
      run_sum += f.f0_hz;
    } else {
      close();
      run_start = i;
      run_len = 1;
      run_sum = f.f0_hz;
    }
  }
  close();
  return out;
}

double tempo(const std::vector<PitchSequence>& seqs, const SteadyConfig& cfg) {
  validate_config(cfg);
  double voiced_seconds = 0.0;
  Index segments = 0;
  for (const PitchSequence& seq : seqs) {
    Index voiced_frames = 0;
    for (const PitchFrame& f : seq.frames)
      if (f.voiced) ++voiced_frames;
    voiced_seconds += static_cast<double>(voiced_frames) * seq.hop_ms / 1000.0;
    segments += static_cast<Index>(detect_steady_states(seq, cfg).size());
  }
  if (!(voiced_seconds > 0.0))
    throw InsufficientData("tempo: no voiced frames in any clip");
  return static_cast<double>(segments) / voiced_seconds;
}

void write_segments_csv(const std::filesystem::path& path,
                        const std::vector<SteadySegment>& segments) {
  std::ostringstream csv;
  csv << "start_ms,end_ms,mean_f0,length_frames\n";
  csv.setf(std::ios::fixed);
  csv.precision(6);
  for (const SteadySegment& s : segments)
    csv << s.start_ms << ',' << s.end_ms << ',' << s.mean_f0 << ','
        << s.length_frames << '\n';
  write_file_atomic(path, csv.str());
}

}  // namespace ragastat
