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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ragastat/audio_ingest.hpp"
#include "ragastat/descriptive_stats.hpp"
#include "ragastat/emotion_label.hpp"
#include "ragastat/types.hpp"

// Emotion-level modelling: per-emotion stacked sequences and their
// signatures, ranking by tempo/variance/MSSD, clip classification against a
// signature table, previous/present rank columns, evolution statistics over
// those columns, and SD/MSSD direction tracking between two epochs.

namespace ragastat {

struct EmotionSignature {
  EmotionLabel emotion = EmotionLabel::Anger;
  DescriptorSet descriptors;  // mean is carried but never compared
  double tempo = 0.0;         // steady states per voiced second
  int rank = 0;               // canonical rank of `emotion`
  Index n_clips = 0;
};

/// Concatenates the voiced values of every sequence labeled `target`, in
/// input order. `labels` is aligned with `seqs`. Throws when no sequence
/// carries the label.
ValueArray stack_sequences(const std::vector<PitchSequence>& seqs,
                           const std::vector<EmotionLabel>& labels,
                           EmotionLabel target);

/// Signature of one emotion from its stacked sequence and tempo.
EmotionSignature build_signature(const Eigen::Ref<const ValueArray>& stacked,
                                 double tempo, EmotionLabel emotion,
                                 Index n_clips = 0, bool mssd_halve = true);

enum class RankKey { Tempo, Variance, Mssd };

/// Labels sorted descending by the chosen key. A tie within 1e-9 relative
/// is an error: the ordering claim collapses if two emotions share a value.
std::vector<EmotionLabel> rank_emotions(
    const std::vector<EmotionSignature>& signatures, RankKey key);

/// A signature table plus (optionally) the stacked sequence each signature
/// was built from. Classification needs the sequences; rank/track flows work
/// from the table alone.
struct SignatureStore {
  std::vector<EmotionSignature> signatures;
  std::map<EmotionLabel, ValueArray> stacked;
};

/// JSON array of {emotion, rank, variance, sd, mssd, skewness, kurtosis,
/// tempo, n_clips}. Stacked sequences go to companion pitch CSVs named
/// stacked_<emotion>.csv next to the JSON file.
void save_signature_store(const std::filesystem::path& path,
                          const SignatureStore& store);

/// Loads the JSON table and any companion stacked CSVs that exist. Absent
/// numeric fields (null) load as NaN.
SignatureStore load_signature_store(const std::filesystem::path& path);

struct MatchCandidate {
  EmotionLabel emotion = EmotionLabel::Anger;
  double levene_p = 0.0;
  double mssd_rel_diff = 0.0;
  bool matched = false;
};

/// Tests the clip against every signature: Levene (median-centered) between
/// the clip values and the signature's stacked sequence, plus the relative
/// MSSD gap |mssd(clip) - mssd(sig)| / mssd(sig). A candidate matches when
/// levene_p >= alpha and the gap is within mssd_rel_tol. Sorted by
/// descending levene_p (ties: smaller gap, then canonical rank). An empty
/// match set is a valid "changed or unknown" outcome. Throws when a
/// signature has no stacked sequence in the store.
std::vector<MatchCandidate> classify_clip(
    const Eigen::Ref<const ValueArray>& clip_values,
    const SignatureStore& store, double alpha = 0.05,
    double mssd_rel_tol = 0.25, bool mssd_halve = true);

struct RankPairRow {
  std::string raga;
  int prev_rank = 0;
  int present_rank = 0;
};

/// Rows grouped contiguously by raga.
using RankPairTable = std::vector<RankPairRow>;

struct RankColumnsResult {
  RankPairTable table;
  std::vector<std::string> warnings;
};

/// Per raga, the full cross product of its previous emotions (ordered,
/// deduplicated union across records) with its present-labeled records, in
/// previous-major order. Records without a present label are skipped; a
/// raga with no present-labeled record at all is skipped with a warning.
RankColumnsResult build_rank_columns(const std::vector<ClipRecord>& records);

struct GroupEvolution {
  Index n = 0;
  double mean_now = 0.0;
  std::optional<double> sd_now;   // absent below 2 rows
  std::optional<double> iqr_now;  // absent below 2 rows
  double mean_diff = 0.0;         // == mean_now - canonical rank
  std::optional<double> sd_diff;  // == sd_now (prev column is constant)
};

struct EvolutionReport {
  std::optional<DescriptorSet> overall_prev;     // absent when not computable
  std::optional<DescriptorSet> overall_present;  // (n < 4 or zero variance)
  std::map<EmotionLabel, GroupEvolution> per_emotion;
  std::array<Index, 7> histogram_prev{};     // index i = count of rank i+1
  std::array<Index, 7> histogram_present{};
};

/// Overall descriptors of both rank columns, per previous-emotion group
/// statistics of the present ranks and of the (present - prev) differences,
/// and rank histograms. Empty table is an error.
EvolutionReport evolution_report(const RankPairTable& table);

/// (present_rank - prev_rank) for every row whose previous emotion is
/// `emotion`. Throws when the emotion has no previous occurrences.
std::vector<int> rank_differences(const RankPairTable& table,
                                  EmotionLabel emotion);

enum class Direction { Increase, Decrease, Flat };

std::string_view to_string(Direction d);

/// SD and MSSD of one emotion's stacked sequence in one epoch.
struct TrackStats {
  double sd = 0.0;
  double mssd = 0.0;
};

struct TrackingVerdict {
  EmotionLabel emotion = EmotionLabel::Anger;
  Direction sd_direction = Direction::Flat;
  Direction mssd_direction = Direction::Flat;
  Direction expected_direction = Direction::Flat;
  bool consistent_sd = true;
  bool consistent_mssd = true;
};

/// Observed directions come from the sign of (now - previous), FLAT only
/// under 1e-6 relative change. Expectation: a positive mean rank shift
/// means the emotion's sequences moved toward the high-SD/high-MSSD end of
/// the canonical ordering, so both measures are expected to INCREASE; a
/// negative shift expects DECREASE. |shift| < 0.5 is treated as no
/// expectation (FLAT): consistency booleans are reported true since there
/// is nothing to contradict.
TrackingVerdict track_direction(EmotionLabel emotion, const TrackStats& prev,
                                const TrackStats& now, double mean_rank_shift);

/// SD/MSSD of one probe clip group (an instrument rendering of the raga)
/// labeled with the emotion it stands for.
struct ProbeStat {
  EmotionLabel emotion = EmotionLabel::Anger;
  double sd = 0.0;
  double mssd = 0.0;
};

struct ProbeOrdering {
  Index n = 0;
  double rho_sd = 0.0;    // Spearman: probe SD order vs signature SD order
  double rho_mssd = 0.0;  // Spearman: probe MSSD order vs signature MSSD order
};

/// Spearman rank correlation between the probe ordering and the signature
/// ordering over the emotions present in both. Needs at least 3 common
/// emotions.
ProbeOrdering probe_ordering(const std::vector<ProbeStat>& probe,
                             const std::vector<EmotionSignature>& signatures);

}  // namespace ragastat
