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

#include "ragastat/emotion_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "ragastat/hypothesis_tests.hpp"
#include "ragastat/io_util.hpp"

namespace ragastat {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string lower_name(EmotionLabel e) {
  std::string s(to_string(e));
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::filesystem::path companion_path(const std::filesystem::path& store_path,
                                     EmotionLabel e) {
  const std::filesystem::path dir = store_path.has_parent_path()
                                        ? store_path.parent_path()
                                        : std::filesystem::path(".");
  return dir / ("stacked_" + lower_name(e) + ".csv");
}

double key_of(const EmotionSignature& s, RankKey key) {
  switch (key) {
    case RankKey::Tempo: return s.tempo;
    case RankKey::Variance: return s.descriptors.variance;
    case RankKey::Mssd: return s.descriptors.mssd;
  }
  throw Error("rank_emotions: invalid key");
}

// Average ranks of `values` in descending order (rank 1 = largest); ties
// share the mean of the positions they span.
std::vector<double> descending_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (!(da > 0.0) || !(db > 0.0))
    throw DegenerateData("probe_ordering: constant rank vector");
  return num / std::sqrt(da * db);
}

}  // namespace

ValueArray stack_sequences(const std::vector<PitchSequence>& seqs,
                           const std::vector<EmotionLabel>& labels,
                           EmotionLabel target) {
  if (seqs.size() != labels.size())
    throw Error("stack_sequences: labels not aligned with sequences");
  std::vector<ValueArray> parts;
  Index total = 0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (labels[i] != target) continue;
    parts.push_back(voiced_values(seqs[i]));
    total += parts.back().size();
  }
  if (parts.empty())
    throw InsufficientData(std::string("stack_sequences: no sequence labeled ") +
                           std::string(to_string(target)));
  ValueArray out(total);
  Index at = 0;
  for (const ValueArray& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

EmotionSignature build_signature(const Eigen::Ref<const ValueArray>& stacked,
                                 double tempo, EmotionLabel emotion,
                                 Index n_clips, bool mssd_halve) {
  EmotionSignature sig;
  sig.emotion = emotion;
  sig.descriptors = describe(stacked, mssd_halve);
  sig.tempo = tempo;
  sig.rank = canonical_rank(emotion);
  sig.n_clips = n_clips;
  return sig;
}

std::vector<EmotionLabel> rank_emotions(
    const std::vector<EmotionSignature>& signatures, RankKey key) {
  if (signatures.size() < 2)
    throw InsufficientData("rank_emotions: need at least 2 signatures");
  std::vector<const EmotionSignature*> order;
  order.reserve(signatures.size());
  for (const auto& s : signatures) {
    if (std::isnan(key_of(s, key)))
      throw Error(std::string("rank_emotions: key unavailable for ") +
                  std::string(to_string(s.emotion)));
    order.push_back(&s);
  }
  std::sort(order.begin(), order.end(),
            [&](const EmotionSignature* a, const EmotionSignature* b) {
              return key_of(*a, key) > key_of(*b, key);
            });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double hi = key_of(*order[i - 1], key);
    const double lo = key_of(*order[i], key);
    if (hi - lo <= 1e-9 * std::max(std::fabs(hi), std::fabs(lo)))
      throw DegenerateData(
          std::string("rank_emotions: tie on ranking key between ") +
          std::string(to_string(order[i - 1]->emotion)) + " and " +
          std::string(to_string(order[i]->emotion)));
  }
  std::vector<EmotionLabel> out;
  out.reserve(order.size());
  for (const auto* s : order) out.push_back(s->emotion);
  return out;
}

void save_signature_store(const std::filesystem::path& path,
                          const SignatureStore& store) {
  using nlohmann::json;
  auto num_or_null = [](double v) {
    return std::isnan(v) ? json(nullptr) : json(v);
  };
  json arr = json::array();
  std::vector<const EmotionSignature*> order;
  for (const auto& s : store.signatures) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const EmotionSignature* a, const EmotionSignature* b) {
              return a->rank < b->rank;
            });
  for (const auto* s : order) {
    json o;
    o["emotion"] = std::string(to_string(s->emotion));
    o["rank"] = s->rank;
    o["variance"] = num_or_null(s->descriptors.variance);
    o["sd"] = num_or_null(s->descriptors.sd);
    o["mssd"] = num_or_null(s->descriptors.mssd);
    o["skewness"] = num_or_null(s->descriptors.skewness);
    o["kurtosis"] = num_or_null(s->descriptors.kurtosis_excess);
    o["tempo"] = num_or_null(s->tempo);
    o["n_clips"] = s->n_clips > 0 ? json(s->n_clips) : json(nullptr);
    arr.push_back(std::move(o));
  }
  write_file_atomic(path, arr.dump(2) + "\n");

  for (const auto& [emotion, values] : store.stacked) {
    PitchSequence seq;
    seq.clip_id = "stacked_" + lower_name(emotion);
    seq.hop_ms = 10.0;
    seq.frames.reserve(static_cast<std::size_t>(values.size()));
    for (Index i = 0; i < values.size(); ++i) {
      PitchFrame f;
      f.time_ms = static_cast<double>(i) * seq.hop_ms;
      f.f0_hz = values[i];
      f.voiced = true;
      seq.frames.push_back(f);
    }
    save_pitch_csv(companion_path(path, emotion), seq);
  }
}

SignatureStore load_signature_store(const std::filesystem::path& path) {
  using nlohmann::json;
  json arr;
  try {
    arr = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("signature store: invalid JSON in " + path.string() +
                     ": " + e.what());
  }
  if (!arr.is_array())
    throw ParseError("signature store: top-level JSON array required");

  auto num_field = [](const json& o, const char* key) {
    if (!o.contains(key) || o[key].is_null()) return kNan;
    if (!o[key].is_number())
      throw ParseError(std::string("signature store: ") + key +
                       " must be a number or null");
    return o[key].get<double>();
  };

  SignatureStore store;
  for (const json& o : arr) {
    if (!o.is_object() || !o.contains("emotion") || !o["emotion"].is_string())
      throw ParseError("signature store: entry needs a string emotion");
    EmotionSignature s;
    s.emotion = parse_emotion(o["emotion"].get<std::string>());
    s.rank = canonical_rank(s.emotion);
    if (o.contains("rank") && !o["rank"].is_null() &&
        o["rank"].get<int>() != s.rank)
      throw ParseError(std::string("signature store: rank of ") +
                       std::string(to_string(s.emotion)) +
                       " contradicts the canonical ordering");
    for (const auto& existing : store.signatures)
      if (existing.emotion == s.emotion)
        throw ParseError(std::string("signature store: duplicate emotion ") +
                         std::string(to_string(s.emotion)));
    s.descriptors.mean = kNan;  // never stored; tonal-bias rule
    s.descriptors.variance = num_field(o, "variance");
    s.descriptors.sd = num_field(o, "sd");
    s.descriptors.mssd = num_field(o, "mssd");
    s.descriptors.skewness = num_field(o, "skewness");
    s.descriptors.kurtosis_excess = num_field(o, "kurtosis");
    s.tempo = num_field(o, "tempo");
    if (std::isnan(s.descriptors.variance) && !std::isnan(s.descriptors.sd))
      s.descriptors.variance = s.descriptors.sd * s.descriptors.sd;
    if (std::isnan(s.descriptors.sd) && !std::isnan(s.descriptors.variance))
      s.descriptors.sd = std::sqrt(s.descriptors.variance);
    if (o.contains("n_clips") && !o["n_clips"].is_null()) {
      if (!o["n_clips"].is_number_integer())
        throw ParseError("signature store: n_clips must be an integer or null");
      s.n_clips = o["n_clips"].get<Index>();
    }
    store.signatures.push_back(std::move(s));
  }

  for (auto& s : store.signatures) {
    const std::filesystem::path cpath = companion_path(path, s.emotion);
    if (!std::filesystem::exists(cpath)) continue;
    const PitchSequence seq = load_pitch_csv(cpath, cpath.stem().string());
    store.stacked[s.emotion] = voiced_values(seq);
    if (s.descriptors.n == 0) s.descriptors.n = store.stacked[s.emotion].size();
  }
  return store;
}

std::vector<MatchCandidate> classify_clip(
    const Eigen::Ref<const ValueArray>& clip_values,
    const SignatureStore& store, double alpha, double mssd_rel_tol,
    bool mssd_halve) {
  if (clip_values.size() < 8)
    throw InsufficientData("classify_clip: need at least 8 voiced values");
  if (!(variance(clip_values) > 0.0))
    throw DegenerateData("classify_clip: degenerate clip (zero variance)");
  if (store.signatures.empty())
    throw InsufficientData("classify_clip: empty signature table");

  const double clip_mssd = mssd(clip_values, mssd_halve);
  std::vector<MatchCandidate> out;
  for (const auto& sig : store.signatures) {
    const auto it = store.stacked.find(sig.emotion);
    if (it == store.stacked.end())
      throw Error(std::string("classify_clip: no stacked sequence for ") +
                  std::string(to_string(sig.emotion)) +
                  "; rebuild the signature store with its companions");
    if (!(sig.descriptors.mssd > 0.0))
      throw Error(std::string("classify_clip: signature MSSD unavailable for ") +
                  std::string(to_string(sig.emotion)));
    MatchCandidate c;
    c.emotion = sig.emotion;
    c.levene_p =
        levene({ValueArray(clip_values), it->second}, alpha, LeveneCenter::Median)
            .p_value;
    c.mssd_rel_diff =
        std::fabs(clip_mssd - sig.descriptors.mssd) / sig.descriptors.mssd;
    c.matched = c.levene_p >= alpha && c.mssd_rel_diff <= mssd_rel_tol;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const MatchCandidate& a, const MatchCandidate& b) {
              if (a.levene_p != b.levene_p) return a.levene_p > b.levene_p;
              if (a.mssd_rel_diff != b.mssd_rel_diff)
                return a.mssd_rel_diff < b.mssd_rel_diff;
              return canonical_rank(a.emotion) < canonical_rank(b.emotion);
            });
  return out;
}

RankColumnsResult build_rank_columns(const std::vector<ClipRecord>& records) {
  struct RagaGroup {
    std::vector<EmotionLabel> prev_union;  // first-occurrence order
    std::vector<EmotionLabel> present;     // record order
  };
  std::vector<std::string> raga_order;
  std::map<std::string, RagaGroup> groups;

  for (const ClipRecord& rec : records) {
    if (rec.previous_emotions.empty())
      throw Error("build_rank_columns: record " + rec.clip_id +
                  " has no previous emotions");
    if (groups.find(rec.raga) == groups.end()) raga_order.push_back(rec.raga);
    RagaGroup& g = groups[rec.raga];
    for (EmotionLabel p : rec.previous_emotions)
      if (std::find(g.prev_union.begin(), g.prev_union.end(), p) ==
          g.prev_union.end())
        g.prev_union.push_back(p);
    if (rec.present_emotion) g.present.push_back(*rec.present_emotion);
  }

  RankColumnsResult result;
  for (const std::string& raga : raga_order) {
    const RagaGroup& g = groups[raga];
    if (g.present.empty()) {
      result.warnings.push_back("raga " + raga +
                                " has no present-labeled records; skipped");
      continue;
    }
    for (EmotionLabel p : g.prev_union)
      for (EmotionLabel s : g.present)
        result.table.push_back(
            {raga, canonical_rank(p), canonical_rank(s)});
  }
  return result;
}

EvolutionReport evolution_report(const RankPairTable& table) {
  if (table.empty())
    throw InsufficientData("evolution_report: empty rank table");

  const auto n = static_cast<Index>(table.size());
  ValueArray prev_col(n), present_col(n);
  EvolutionReport report;
  for (Index i = 0; i < n; ++i) {
    const RankPairRow& row = table[static_cast<std::size_t>(i)];
    if (row.prev_rank < 1 || row.prev_rank > 7 || row.present_rank < 1 ||
        row.present_rank > 7)
      throw Error("evolution_report: rank outside 1..7 in row of raga " +
                  row.raga);
    prev_col[i] = static_cast<double>(row.prev_rank);
    present_col[i] = static_cast<double>(row.present_rank);
    report.histogram_prev[static_cast<std::size_t>(row.prev_rank - 1)] += 1;
    report.histogram_present[static_cast<std::size_t>(row.present_rank - 1)] += 1;
  }

  auto try_describe = [](const ValueArray& col) -> std::optional<DescriptorSet> {
    try {
      return describe(col);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  report.overall_prev = try_describe(prev_col);
  report.overall_present = try_describe(present_col);

  std::map<EmotionLabel, std::vector<double>> now_by_prev;
  for (const RankPairRow& row : table)
    now_by_prev[emotion_from_rank(row.prev_rank)].push_back(
        static_cast<double>(row.present_rank));

  for (const auto& [emotion, values] : now_by_prev) {
    const auto m = static_cast<Index>(values.size());
    const Eigen::Map<const ValueArray> now(values.data(), m);
    GroupEvolution g;
    g.n = m;
    g.mean_now = now.mean();
    g.mean_diff = g.mean_now - static_cast<double>(canonical_rank(emotion));
    if (m >= 2) {
      const ValueArray diffs = now - static_cast<double>(canonical_rank(emotion));
      g.sd_now = stddev(now);
      g.iqr_now = iqr(now);
      g.sd_diff = stddev(diffs);
    }
    report.per_emotion[emotion] = g;
  }
  return report;
}

std::vector<int> rank_differences(const RankPairTable& table,
                                  EmotionLabel emotion) {
  const int rank = canonical_rank(emotion);
  std::vector<int> out;
  for (const RankPairRow& row : table)
    if (row.prev_rank == rank) out.push_back(row.present_rank - row.prev_rank);
  if (out.empty())
    throw InsufficientData(std::string("rank_differences: ") +
                           std::string(to_string(emotion)) +
                           " has no previous occurrences");
  return out;
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Increase: return "INCREASE";
    case Direction::Decrease: return "DECREASE";
    case Direction::Flat: return "FLAT";
  }
  throw Error("to_string: invalid direction value");
}

TrackingVerdict track_direction(EmotionLabel emotion, const TrackStats& prev,
                                const TrackStats& now,
                                double mean_rank_shift) {
  auto observed = [](double before, double after) {
    const double scale = std::max(std::fabs(before), std::fabs(after));
    if (scale == 0.0 || std::fabs(after - before) < 1e-6 * scale)
      return Direction::Flat;
    return after > before ? Direction::Increase : Direction::Decrease;
  };

  TrackingVerdict v;
  v.emotion = emotion;
  v.sd_direction = observed(prev.sd, now.sd);
  v.mssd_direction = observed(prev.mssd, now.mssd);
  if (std::fabs(mean_rank_shift) < 0.5)
    v.expected_direction = Direction::Flat;
  else
    v.expected_direction =
        mean_rank_shift > 0.0 ? Direction::Increase : Direction::Decrease;
  // A FLAT expectation asserts nothing, so nothing can contradict it.
  v.consistent_sd = v.expected_direction == Direction::Flat ||
                    v.sd_direction == v.expected_direction;
  v.consistent_mssd = v.expected_direction == Direction::Flat ||
                      v.mssd_direction == v.expected_direction;
  return v;
}

ProbeOrdering probe_ordering(const std::vector<ProbeStat>& probe,
                             const std::vector<EmotionSignature>& signatures) {
  std::vector<double> probe_sd, probe_mssd, sig_sd, sig_mssd;
  for (const ProbeStat& p : probe) {
    const auto it = std::find_if(
        signatures.begin(), signatures.end(),
        [&](const EmotionSignature& s) { return s.emotion == p.emotion; });
    if (it == signatures.end()) continue;
    if (std::isnan(it->descriptors.sd) || std::isnan(it->descriptors.mssd))
      throw Error(std::string("probe_ordering: signature SD/MSSD missing for ") +
                  std::string(to_string(p.emotion)));
    probe_sd.push_back(p.sd);
    probe_mssd.push_back(p.mssd);
    sig_sd.push_back(it->descriptors.sd);
    sig_mssd.push_back(it->descriptors.mssd);
  }
  if (probe_sd.size() < 3)
    throw InsufficientData(
        "probe_ordering: need at least 3 emotions shared with the signature "
        "table");
  ProbeOrdering o;
  o.n = static_cast<Index>(probe_sd.size());
  o.rho_sd = pearson(descending_ranks(probe_sd), descending_ranks(sig_sd));
  o.rho_mssd =
      pearson(descending_ranks(probe_mssd), descending_ranks(sig_mssd));
  return o;
}

}  // namespace ragastat
