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

// Command-line surface of the pipeline. Subcommands:
//   extract     WAV -> pitch CSV (and optionally steady-state segments)
//   describe    pitch CSV -> descriptor table (CSV or JSON)
//   signatures  manifest -> per-emotion signature store + rankings
//   classify    clip vs signature store; probe-ordering report
//   evolve      manifest -> rank columns, evolution statistics, histograms
//   track       two epoch stores -> SD/MSSD direction verdicts + quartiles
//
// Every command takes --config (JSON run configuration), --format,
// --output-dir and --no-timestamp. Report files carry a generation
// timestamp unless suppressed; data files (pitch CSVs, signature stores)
// never do, so identical inputs give byte-identical outputs. Exit code is
// 0 iff no per-item errors occurred.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ragastat/audio_ingest.hpp"
#include "ragastat/descriptive_stats.hpp"
#include "ragastat/emotion_label.hpp"
#include "ragastat/emotion_model.hpp"
#include "ragastat/io_util.hpp"
#include "ragastat/pitch_tracker.hpp"
#include "ragastat/steady_state.hpp"
#include "ragastat/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ragastat;

namespace {

struct RunConfig {
  PitchConfig pitch;
  SteadyConfig steady;
  double alpha = 0.05;
  bool mssd_halve = true;
  double mssd_rel_tol = 0.25;
  fs::path output_dir = ".";
  std::string format = "csv";
};

double num_at(const json& o, const char* key, double fallback) {
  if (!o.contains(key) || o[key].is_null()) return fallback;
  if (!o[key].is_number())
    throw ParseError(std::string("config: ") + key + " must be a number");
  return o[key].get<double>();
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig cfg;
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("config: top level must be an object");
  if (doc.contains("pitch")) {
    const json& p = doc["pitch"];
    cfg.pitch.f_min_hz = num_at(p, "f_min_hz", cfg.pitch.f_min_hz);
    cfg.pitch.f_max_hz = num_at(p, "f_max_hz", cfg.pitch.f_max_hz);
    cfg.pitch.frame_ms = num_at(p, "frame_ms", cfg.pitch.frame_ms);
    cfg.pitch.hop_ms = num_at(p, "hop_ms", cfg.pitch.hop_ms);
    cfg.pitch.voicing_threshold =
        num_at(p, "voicing_threshold", cfg.pitch.voicing_threshold);
  }
  if (doc.contains("steady")) {
    const json& s = doc["steady"];
    cfg.steady.band_fraction =
        num_at(s, "band_fraction", cfg.steady.band_fraction);
    cfg.steady.min_len_frames = static_cast<Index>(
        num_at(s, "min_len_frames",
               static_cast<double>(cfg.steady.min_len_frames)));
  }
  cfg.alpha = num_at(doc, "alpha", cfg.alpha);
  cfg.mssd_rel_tol = num_at(doc, "mssd_rel_tol", cfg.mssd_rel_tol);
  if (doc.contains("mssd_halve")) {
    if (!doc["mssd_halve"].is_boolean())
      throw ParseError("config: mssd_halve must be a boolean");
    cfg.mssd_halve = doc["mssd_halve"].get<bool>();
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string())
      throw ParseError("config: output_dir must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("format")) {
    if (!doc["format"].is_string())
      throw ParseError("config: format must be a string");
    cfg.format = doc["format"].get<std::string>();
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 0.5))
    throw ParseError("config: alpha must lie in (0, 0.5]");
  if (cfg.mssd_rel_tol < 0.0)
    throw ParseError("config: mssd_rel_tol must be nonnegative");
  if (cfg.format != "csv" && cfg.format != "json")
    throw ParseError("config: format must be csv or json");
  return cfg;
}

// Options shared by every subcommand. Explicit flags override the config
// file, which overrides the built-in defaults.
struct Common {
  std::string config_path;
  std::string format;
  std::string output_dir;
  bool no_timestamp = false;
  RunConfig cfg;

  void resolve() {
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (!format.empty()) cfg.format = format;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path,
                  "JSON run configuration file (partial configs allowed)");
  cmd->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output-dir", c.output_dir, "Directory for output files");
  cmd->add_flag("--no-timestamp", c.no_timestamp,
                "Omit generation timestamps so reruns are byte-identical");
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string stamp_line(const Common& c) {
  return c.no_timestamp ? std::string()
                        : "# generated: " + utc_timestamp() + "\n";
}

void stamp_json(json& doc, const Common& c) {
  if (!c.no_timestamp) doc["generated_at"] = utc_timestamp();
}

// CSV cell: full precision, empty for absent (NaN) values.
std::string cell(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Human-facing number: short, empty never (prints nan as such).
std::string disp(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json num_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json descriptors_json(const DescriptorSet& d) {
  json o;
  o["n"] = d.n;
  o["mean"] = num_or_null(d.mean);
  o["variance"] = num_or_null(d.variance);
  o["sd"] = num_or_null(d.sd);
  o["skewness"] = num_or_null(d.skewness);
  o["kurtosis_excess"] = num_or_null(d.kurtosis_excess);
  o["mssd"] = num_or_null(d.mssd);
  o["iqr"] = num_or_null(d.iqr);
  return o;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> csv_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::stringstream ss(read_file(path));
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

const EmotionSignature* find_signature(const SignatureStore& store,
                                       EmotionLabel e) {
  for (const EmotionSignature& s : store.signatures)
    if (s.emotion == e) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// extract

int cmd_extract(const std::vector<std::string>& files, bool segments,
                Common& c) {
  int failures = 0;
  for (const std::string& f : files) {
    try {
      const fs::path in(f);
      const AudioClip clip = decode_wav(in);
      const PitchSequence seq = extract_f0(clip, c.cfg.pitch);
      const fs::path out = c.cfg.output_dir / (in.stem().string() + ".csv");
      save_pitch_csv(out, seq);
      Index voiced = 0;
      for (const PitchFrame& fr : seq.frames) voiced += fr.voiced ? 1 : 0;
      const double fraction =
          seq.frames.empty()
              ? 0.0
              : static_cast<double>(voiced) /
                    static_cast<double>(seq.frames.size());
      std::cout << clip.clip_id << ": frames=" << seq.frames.size()
                << " voiced=" << voiced << " (" << disp(fraction) << ") -> "
                << out.string();
      if (segments) {
        const std::vector<SteadySegment> segs =
            detect_steady_states(seq, c.cfg.steady);
        const fs::path segout =
            c.cfg.output_dir / (in.stem().string() + "_segments.csv");
        write_segments_csv(segout, segs);
        std::cout << " segments=" << segs.size();
        if (voiced > 0)
          std::cout << " tempo=" << disp(tempo({seq}, c.cfg.steady));
        else
          std::cout << " tempo=n/a";
      }
      std::cout << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "error: " << f << ": " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// describe

int cmd_describe(const std::vector<std::string>& files,
                 const std::string& output, Common& c) {
  int failures = 0;
  struct Row {
    std::string clip;
    DescriptorSet d;
  };
  std::vector<Row> rows;
  for (const std::string& f : files) {
    try {
      const fs::path in(f);
      const PitchSequence seq = load_pitch_csv(in, in.stem().string());
      rows.push_back(
          {seq.clip_id, describe(voiced_values(seq), c.cfg.mssd_halve)});
    } catch (const InsufficientData& e) {
      ++failures;
      std::cerr << "error: " << f << ": insufficient data: " << e.what()
                << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "error: " << f << ": " << e.what() << "\n";
    }
  }
  std::string text;
  if (c.cfg.format == "csv") {
    std::ostringstream os;
    os << "clip,n,mean,variance,sd,skewness,kurtosis_excess,mssd,iqr\n";
    for (const Row& r : rows)
      os << r.clip << ',' << r.d.n << ',' << cell(r.d.mean) << ','
         << cell(r.d.variance) << ',' << cell(r.d.sd) << ','
         << cell(r.d.skewness) << ',' << cell(r.d.kurtosis_excess) << ','
         << cell(r.d.mssd) << ',' << cell(r.d.iqr) << "\n";
    text = os.str();
  } else {
    json arr = json::array();
    for (const Row& r : rows) {
      json o = descriptors_json(r.d);
      o["clip"] = r.clip;
      arr.push_back(o);
    }
    text = arr.dump(2) + "\n";
  }
  std::cout << text;
  if (!output.empty()) {
    if (c.cfg.format == "csv") {
      write_file_atomic(output, stamp_line(c) + text);
    } else {
      json doc;
      stamp_json(doc, c);
      doc["clips"] = json::parse(text);
      write_file_atomic(output, doc.dump(2) + "\n");
    }
  }
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// signatures

int cmd_signatures(const std::string& manifest_path,
                   const std::string& label_source, Common& c) {
  const fs::path mpath(manifest_path);
  const DatasetManifest m = load_manifest(mpath);
  const fs::path mdir = mpath.parent_path();
  int failures = 0;

  SignatureStore store;
  if (m.signature_source.has_value()) {
    const fs::path spath = mdir / *m.signature_source;
    store = load_signature_store(spath);
    std::cout << "loaded stored signature table from " << spath.string()
              << " (" << store.signatures.size() << " emotions, "
              << store.stacked.size() << " stacked sequences)\n";
  } else {
    if (m.records.empty())
      throw Error("manifest has no records and no signature_source");
    struct Loaded {
      const ClipRecord* rec;
      PitchSequence seq;
    };
    std::vector<Loaded> clips;
    for (const ClipRecord& rec : m.records) {
      if (!rec.source_path.has_value()) {
        ++failures;
        std::cerr << "error: " << rec.clip_id
                  << ": record has no source_path\n";
        continue;
      }
      try {
        clips.push_back(
            {&rec, load_pitch_csv(mdir / *rec.source_path, rec.clip_id)});
      } catch (const std::exception& e) {
        ++failures;
        std::cerr << "error: " << rec.clip_id << ": " << e.what() << "\n";
      }
    }
    const bool use_present = label_source == "present";
    for (EmotionLabel e : kAllEmotions) {
      std::vector<PitchSequence> seqs;
      for (const Loaded& L : clips) {
        const bool carries =
            use_present
                ? L.rec->present_emotion == e
                : std::find(L.rec->previous_emotions.begin(),
                            L.rec->previous_emotions.end(),
                            e) != L.rec->previous_emotions.end();
        if (carries) seqs.push_back(L.seq);
      }
      if (seqs.empty()) continue;
      const ValueArray stacked = stack_sequences(
          seqs, std::vector<EmotionLabel>(seqs.size(), e), e);
      const double tp = tempo(seqs, c.cfg.steady);
      store.signatures.push_back(
          build_signature(stacked, tp, e, static_cast<Index>(seqs.size()),
                          c.cfg.mssd_halve));
      store.stacked[e] = stacked;
    }
    if (store.signatures.empty())
      throw Error("no clip carries any usable " + label_source + " label");
  }

  const fs::path out = c.cfg.output_dir / "signatures.json";
  save_signature_store(out, store);
  std::cout << "wrote " << out.string() << " (" << store.stacked.size()
            << " stacked companions)\n";

  std::cout << "emotion,rank,tempo,variance,mssd,n_clips\n";
  for (const EmotionSignature& s : store.signatures)
    std::cout << to_string(s.emotion) << ',' << s.rank << ',' << cell(s.tempo)
              << ',' << cell(s.descriptors.variance) << ','
              << cell(s.descriptors.mssd) << ',' << s.n_clips << "\n";
  for (EmotionLabel e : kAllEmotions)
    if (find_signature(store, e) == nullptr)
      std::cout << "absent: " << to_string(e) << " (no clips under "
                << label_source << " labels)\n";

  const std::pair<RankKey, const char*> keys[] = {
      {RankKey::Tempo, "tempo"},
      {RankKey::Variance, "variance"},
      {RankKey::Mssd, "mssd"}};
  std::vector<std::optional<std::vector<EmotionLabel>>> orders;
  for (const auto& [key, name] : keys) {
    try {
      std::vector<EmotionLabel> order = rank_emotions(store.signatures, key);
      std::ostringstream os;
      for (std::size_t i = 0; i < order.size(); ++i)
        os << (i ? " > " : "") << to_string(order[i]);
      std::cout << "ranking by " << name << ": " << os.str() << "\n";
      orders.emplace_back(std::move(order));
    } catch (const Error& e) {
      std::cout << "ranking by " << name << " unavailable: " << e.what()
                << "\n";
      orders.emplace_back(std::nullopt);
    }
  }
  if (orders[0] && orders[1] && orders[2]) {
    if (*orders[0] == *orders[1] && *orders[1] == *orders[2])
      std::cout << "concordance: all three orderings are identical\n";
    else
      std::cout << "concordance: orderings differ across keys\n";
  } else {
    std::cout << "concordance: not assessable (a ranking was unavailable)\n";
  }
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// classify

std::vector<ProbeStat> load_probe_stats(const fs::path& path) {
  const std::vector<std::string> lines = csv_lines(path);
  if (lines.empty() || lines[0] != "raga,emotion,sd,mssd")
    throw ParseError("probe stats " + path.string() +
                     ": expected header raga,emotion,sd,mssd");
  std::vector<ProbeStat> probe;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() != 4)
      throw ParseError("probe stats: line " + std::to_string(i + 1) +
                       " needs 4 fields");
    probe.push_back(
        {parse_emotion(f[1]), std::stod(f[2]), std::stod(f[3])});
  }
  return probe;
}

int cmd_classify(const std::string& clip_path, const std::string& store_path,
                 const std::string& probe_path, Common& c) {
  const SignatureStore store = load_signature_store(store_path);
  int failures = 0;

  if (!clip_path.empty()) {
    try {
      const fs::path in(clip_path);
      const PitchSequence seq = load_pitch_csv(in, in.stem().string());
      const std::vector<MatchCandidate> candidates =
          classify_clip(voiced_values(seq), store, c.cfg.alpha,
                        c.cfg.mssd_rel_tol, c.cfg.mssd_halve);

      std::cout << "clip " << seq.clip_id << " vs " << store_path << ":\n";
      std::cout << "emotion,levene_p,mssd_rel_diff,matched\n";
      for (const MatchCandidate& m : candidates)
        std::cout << to_string(m.emotion) << ',' << cell(m.levene_p) << ','
                  << cell(m.mssd_rel_diff) << ','
                  << (m.matched ? "true" : "false") << "\n";
      const auto best = std::find_if(candidates.begin(), candidates.end(),
                                     [](const MatchCandidate& m) {
                                       return m.matched;
                                     });
      if (best != candidates.end())
        std::cout << "best match: " << to_string(best->emotion)
                  << " (levene_p=" << disp(best->levene_p)
                  << ", mssd_rel_diff=" << disp(best->mssd_rel_diff) << ")\n";
      else
        std::cout << "no match: every candidate failed a gate (alpha="
                  << disp(c.cfg.alpha)
                  << ", mssd_rel_tol=" << disp(c.cfg.mssd_rel_tol)
                  << "); a changed or unknown emotion is a valid outcome\n";

      const fs::path report =
          c.cfg.output_dir / ("classification." + c.cfg.format);
      if (c.cfg.format == "csv") {
        std::ostringstream os;
        os << stamp_line(c) << "clip,emotion,levene_p,mssd_rel_diff,matched\n";
        for (const MatchCandidate& m : candidates)
          os << seq.clip_id << ',' << to_string(m.emotion) << ','
             << cell(m.levene_p) << ',' << cell(m.mssd_rel_diff) << ','
             << (m.matched ? "true" : "false") << "\n";
        write_file_atomic(report, os.str());
      } else {
        json doc;
        stamp_json(doc, c);
        doc["clip"] = seq.clip_id;
        doc["alpha"] = c.cfg.alpha;
        doc["mssd_rel_tol"] = c.cfg.mssd_rel_tol;
        doc["candidates"] = json::array();
        for (const MatchCandidate& m : candidates)
          doc["candidates"].push_back({{"emotion", to_string(m.emotion)},
                                       {"levene_p", m.levene_p},
                                       {"mssd_rel_diff", m.mssd_rel_diff},
                                       {"matched", m.matched}});
        doc["best"] = best != candidates.end()
                          ? json(std::string(to_string(best->emotion)))
                          : json(nullptr);
        write_file_atomic(report, doc.dump(2) + "\n");
      }
    } catch (const InsufficientData& e) {
      ++failures;
      std::cerr << "error: " << clip_path << ": insufficient data: "
                << e.what() << "\n";
    } catch (const Error& e) {
      ++failures;
      std::string msg = e.what();
      if (msg.find("stacked") != std::string::npos)
        msg += " (re-run `ragastat signatures` against the original manifest)";
      std::cerr << "error: " << clip_path << ": " << msg << "\n";
    }
  }

  if (!probe_path.empty()) {
    try {
      const std::vector<ProbeStat> probe = load_probe_stats(probe_path);
      const ProbeOrdering o = probe_ordering(probe, store.signatures);
      std::cout << "probe ordering over " << o.n
                << " common emotions: rho_sd=" << disp(o.rho_sd)
                << " rho_mssd=" << disp(o.rho_mssd) << "\n";
      if (o.rho_sd > 0.0 && o.rho_mssd > 0.0)
        std::cout << "the signature ordering is preserved on an average "
                     "across instrument and performer\n";
      else
        std::cout << "the signature ordering is not preserved by the probe "
                     "set\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cerr << "error: " << probe_path << ": " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// evolve

void compare_with_reference(const EvolutionReport& rep, const json& ref) {
  int agree = 0, differ = 0;
  const auto cmp = [&](const std::string& what, double derived,
                       const json& refval) {
    if (!refval.is_number()) return;
    const double r = refval.get<double>();
    if (std::isnan(derived)) {
      ++differ;
      std::cout << "warning: " << what << ": published " << disp(r)
                << " but no derived value\n";
      return;
    }
    if (std::fabs(derived - r) > 0.005) {
      ++differ;
      std::cout << "warning: " << what << ": derived " << disp(derived)
                << " differs from published " << disp(r) << "\n";
    } else {
      ++agree;
    }
  };

  if (ref.contains("overall") && ref["overall"].is_object()) {
    const auto overall_cmp = [&](const char* name,
                                 const std::optional<DescriptorSet>& d) {
      if (!ref["overall"].contains(name)) return;
      const json& r = ref["overall"][name];
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const std::string col = std::string(name) + " column ";
      cmp(col + "variance", d ? d->variance : nan, r.value("variance", json()));
      cmp(col + "iqr", d ? d->iqr : nan, r.value("iqr", json()));
      cmp(col + "skewness", d ? d->skewness : nan, r.value("skewness", json()));
      cmp(col + "kurtosis", d ? d->kurtosis_excess : nan,
          r.value("kurtosis", json()));
    };
    overall_cmp("previous", rep.overall_prev);
    overall_cmp("present", rep.overall_present);
  }
  if (ref.contains("per_emotion") && ref["per_emotion"].is_object()) {
    for (const auto& [name, vals] : ref["per_emotion"].items()) {
      const EmotionLabel e = parse_emotion(name);
      const auto it = rep.per_emotion.find(e);
      if (it == rep.per_emotion.end()) {
        ++differ;
        std::cout << "warning: " << name
                  << ": published group has no derived counterpart\n";
        continue;
      }
      const GroupEvolution& g = it->second;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cmp(name + " mean_now", g.mean_now, vals.value("mean_now", json()));
      cmp(name + " sd_now", g.sd_now.value_or(nan),
          vals.value("sd_now", json()));
      cmp(name + " iqr_now", g.iqr_now.value_or(nan),
          vals.value("iqr_now", json()));
      cmp(name + " mean_diff", g.mean_diff, vals.value("mean_diff", json()));
      cmp(name + " sd_diff", g.sd_diff.value_or(nan),
          vals.value("sd_diff", json()));
    }
  }
  std::cout << "reference check: " << agree << " values agree within 0.005, "
            << differ << " differ (rule derivation vs published fixtures)\n";
}

int cmd_evolve(const std::string& manifest_path,
               const std::string& reference_path, Common& c) {
  const DatasetManifest m = load_manifest(manifest_path);
  const RankColumnsResult res = build_rank_columns(m.records);
  for (const std::string& w : res.warnings)
    std::cout << "warning: " << w << "\n";
  if (res.table.empty())
    throw Error("no raga carries both previous and present labels");
  const EvolutionReport rep = evolution_report(res.table);

  const std::string stamp = stamp_line(c);
  const fs::path dir = c.cfg.output_dir;
  {
    std::ostringstream os;
    os << stamp << "raga,prev_rank,present_rank\n";
    for (const RankPairRow& r : res.table)
      os << r.raga << ',' << r.prev_rank << ',' << r.present_rank << "\n";
    write_file_atomic(dir / "rank_pairs.csv", os.str());
  }
  {
    std::ostringstream os;
    os << stamp << "column,n,variance,sd,iqr,skewness,kurtosis_excess,mssd\n";
    const auto row = [&os](const char* name,
                           const std::optional<DescriptorSet>& d) {
      os << name << ',';
      if (d)
        os << d->n << ',' << cell(d->variance) << ',' << cell(d->sd) << ','
           << cell(d->iqr) << ',' << cell(d->skewness) << ','
           << cell(d->kurtosis_excess) << ',' << cell(d->mssd);
      else
        os << ",,,,,,";
      os << "\n";
    };
    row("previous", rep.overall_prev);
    row("present", rep.overall_present);
    write_file_atomic(dir / "overall.csv", os.str());
  }
  {
    std::ostringstream os;
    os << stamp << "emotion,n,mean_now,sd_now,iqr_now,mean_diff,sd_diff\n";
    for (const auto& [e, g] : rep.per_emotion) {
      os << to_string(e) << ',' << g.n << ',' << cell(g.mean_now) << ','
         << (g.sd_now ? cell(*g.sd_now) : "") << ','
         << (g.iqr_now ? cell(*g.iqr_now) : "") << ',' << cell(g.mean_diff)
         << ',' << (g.sd_diff ? cell(*g.sd_diff) : "") << "\n";
    }
    write_file_atomic(dir / "per_emotion.csv", os.str());
  }
  {
    std::ostringstream os;
    os << stamp << "emotion,difference\n";
    for (const auto& [e, g] : rep.per_emotion)
      for (int d : rank_differences(res.table, e))
        os << to_string(e) << ',' << d << "\n";
    write_file_atomic(dir / "differences.csv", os.str());
  }
  {
    std::ostringstream os;
    os << stamp << "rank,count_prev,count_present\n";
    for (int r = 1; r <= 7; ++r)
      os << r << ',' << rep.histogram_prev[r - 1] << ','
         << rep.histogram_present[r - 1] << "\n";
    write_file_atomic(dir / "histogram.csv", os.str());
  }
  {
    json doc;
    stamp_json(doc, c);
    doc["rows"] = static_cast<Index>(res.table.size());
    doc["warnings"] = res.warnings;
    doc["overall"]["previous"] =
        rep.overall_prev ? descriptors_json(*rep.overall_prev) : json(nullptr);
    doc["overall"]["present"] = rep.overall_present
                                    ? descriptors_json(*rep.overall_present)
                                    : json(nullptr);
    doc["per_emotion"] = json::object();
    for (const auto& [e, g] : rep.per_emotion) {
      json o;
      o["n"] = g.n;
      o["mean_now"] = g.mean_now;
      o["sd_now"] = g.sd_now ? json(*g.sd_now) : json(nullptr);
      o["iqr_now"] = g.iqr_now ? json(*g.iqr_now) : json(nullptr);
      o["mean_diff"] = g.mean_diff;
      o["sd_diff"] = g.sd_diff ? json(*g.sd_diff) : json(nullptr);
      doc["per_emotion"][std::string(to_string(e))] = o;
    }
    doc["histogram"] = json::array();
    for (int r = 1; r <= 7; ++r)
      doc["histogram"].push_back({{"rank", r},
                                  {"count_prev", rep.histogram_prev[r - 1]},
                                  {"count_present",
                                   rep.histogram_present[r - 1]}});
    write_file_atomic(dir / "evolution.json", doc.dump(2) + "\n");
  }

  std::cout << "rank rows: " << res.table.size() << "\n";
  const auto overall_line = [](const char* name,
                               const std::optional<DescriptorSet>& d) {
    if (!d) return;
    std::cout << name << " column: variance=" << disp(d->variance)
              << " iqr=" << disp(d->iqr) << " skewness=" << disp(d->skewness)
              << " kurtosis_excess=" << disp(d->kurtosis_excess) << "\n";
  };
  overall_line("previous", rep.overall_prev);
  overall_line("present", rep.overall_present);
  for (const auto& [e, g] : rep.per_emotion) {
    std::cout << to_string(e) << ": n=" << g.n
              << " mean_now=" << disp(g.mean_now);
    if (g.sd_now) std::cout << " sd_now=" << disp(*g.sd_now);
    if (g.iqr_now) std::cout << " iqr_now=" << disp(*g.iqr_now);
    std::cout << " mean_diff=" << disp(g.mean_diff);
    if (g.sd_diff) std::cout << " sd_diff=" << disp(*g.sd_diff);
    std::cout << "\n";
  }

  if (!reference_path.empty()) {
    json ref;
    try {
      ref = json::parse(read_file(reference_path));
    } catch (const json::exception& e) {
      throw ParseError("reference " + reference_path + ": " + e.what());
    }
    compare_with_reference(rep, ref);
  }
  std::cout << "wrote rank_pairs.csv, overall.csv, per_emotion.csv, "
               "differences.csv, histogram.csv, evolution.json under "
            << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// track

std::map<EmotionLabel, double> load_rank_shifts(const fs::path& path) {
  const std::vector<std::string> lines = csv_lines(path);
  if (lines.empty() || split_csv_line(lines[0]).size() < 2 ||
      split_csv_line(lines[0])[0] != "emotion")
    throw ParseError("rank shifts " + path.string() +
                     ": expected header emotion,mean_shift[,...]");
  std::map<EmotionLabel, double> shifts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split_csv_line(lines[i]);
    if (f.size() < 2)
      throw ParseError("rank shifts: line " + std::to_string(i + 1) +
                       " needs at least 2 fields");
    shifts[parse_emotion(f[0])] = std::stod(f[1]);
  }
  return shifts;
}

int cmd_track(const std::string& prev_path, const std::string& now_path,
              const std::string& shifts_path, Common& c) {
  const SignatureStore prev = load_signature_store(prev_path);
  const SignatureStore now = load_signature_store(now_path);
  std::map<EmotionLabel, double> shifts;
  if (!shifts_path.empty()) shifts = load_rank_shifts(shifts_path);

  std::ostringstream os;
  os << stamp_line(c)
     << "emotion,sd_prev,sd_now,sd_direction,mssd_prev,mssd_now,"
        "mssd_direction,expected_direction,consistent_sd,consistent_mssd,"
        "status\n";
  const std::string header =
      "emotion,sd_prev,sd_now,sd_direction,mssd_prev,mssd_now,"
      "mssd_direction,expected_direction,consistent_sd,consistent_mssd,"
      "status";
  std::cout << header << "\n";

  for (EmotionLabel e : kAllEmotions) {
    const EmotionSignature* ps = find_signature(prev, e);
    const EmotionSignature* ns = find_signature(now, e);
    if (ps == nullptr && ns == nullptr) continue;
    std::string line;
    if (ps == nullptr || ns == nullptr ||
        std::isnan(ps->descriptors.sd) || std::isnan(ps->descriptors.mssd) ||
        std::isnan(ns ? ns->descriptors.sd
                      : std::numeric_limits<double>::quiet_NaN()) ||
        std::isnan(ns ? ns->descriptors.mssd
                      : std::numeric_limits<double>::quiet_NaN())) {
      const std::string sd_prev =
          ps ? cell(ps->descriptors.sd) : std::string();
      const std::string sd_now = ns ? cell(ns->descriptors.sd) : std::string();
      const std::string ms_prev =
          ps ? cell(ps->descriptors.mssd) : std::string();
      const std::string ms_now =
          ns ? cell(ns->descriptors.mssd) : std::string();
      line = std::string(to_string(e)) + ',' + sd_prev + ',' + sd_now +
             ",," + ms_prev + ',' + ms_now + ",,,,,insufficient data";
    } else {
      const TrackStats a{ps->descriptors.sd, ps->descriptors.mssd};
      const TrackStats b{ns->descriptors.sd, ns->descriptors.mssd};
      const auto it = shifts.find(e);
      const bool has_shift = it != shifts.end();
      const TrackingVerdict v =
          track_direction(e, a, b, has_shift ? it->second : 0.0);
      line = std::string(to_string(e)) + ',' + cell(a.sd) + ',' +
             cell(b.sd) + ',' + std::string(to_string(v.sd_direction)) + ',' +
             cell(a.mssd) + ',' + cell(b.mssd) + ',' +
             std::string(to_string(v.mssd_direction)) + ',';
      if (has_shift)
        line += std::string(to_string(v.expected_direction)) + ',' +
                (v.consistent_sd ? "true" : "false") + ',' +
                (v.consistent_mssd ? "true" : "false");
      else
        line += "(none),-,-";
      line += ",ok";
    }
    os << line << "\n";
    std::cout << line << "\n";
  }
  write_file_atomic(c.cfg.output_dir / "verdicts.csv", os.str());

  // Box-plot-ready quartiles of each epoch's stacked sequences.
  std::ostringstream qs;
  qs << stamp_line(c) << "epoch,emotion,n,min,q1,median,q3,max,status\n";
  const std::pair<const char*, const SignatureStore*> epochs[] = {
      {"previous", &prev}, {"present", &now}};
  for (const auto& [name, store] : epochs) {
    for (const EmotionSignature& s : store->signatures) {
      const auto it = store->stacked.find(s.emotion);
      if (it == store->stacked.end()) {
        qs << name << ',' << to_string(s.emotion)
           << ",,,,,,,no stacked data\n";
        continue;
      }
      const ValueArray& xs = it->second;
      qs << name << ',' << to_string(s.emotion) << ',' << xs.size() << ','
         << cell(xs.minCoeff()) << ',' << cell(quantile(xs, 0.25)) << ','
         << cell(quantile(xs, 0.5)) << ',' << cell(quantile(xs, 0.75)) << ','
         << cell(xs.maxCoeff()) << ",ok\n";
    }
  }
  write_file_atomic(c.cfg.output_dir / "quartiles.csv", qs.str());
  std::cout << "wrote verdicts.csv, quartiles.csv under "
            << c.cfg.output_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pitch-period statistics of emotion-labeled music clips"};
  app.require_subcommand(1);

  Common c_extract, c_describe, c_signatures, c_classify, c_evolve, c_track;

  std::vector<std::string> extract_files;
  bool extract_segments = false;
  CLI::App* extract =
      app.add_subcommand("extract", "Decode WAV files to pitch CSVs");
  extract->add_option("files", extract_files, "WAV files")->required();
  extract->add_flag("--segments", extract_segments,
                    "Also write steady-state segment CSVs");
  add_common(extract, c_extract);

  std::vector<std::string> describe_files;
  std::string describe_output;
  CLI::App* describe_cmd = app.add_subcommand(
      "describe", "Descriptor table for pitch CSVs (CSV or JSON)");
  describe_cmd->add_option("files", describe_files, "Pitch CSV files")
      ->required();
  describe_cmd->add_option("--output", describe_output,
                           "Also write the table to this file");
  add_common(describe_cmd, c_describe);

  std::string sig_manifest, sig_label_source = "present";
  CLI::App* signatures =
      app.add_subcommand("signatures", "Build or load a signature store");
  signatures->add_option("--manifest", sig_manifest, "Dataset manifest JSON")
      ->required();
  signatures
      ->add_option("--label-source", sig_label_source,
                   "Which labels group clips into emotions")
      ->check(CLI::IsMember({"previous", "present"}));
  add_common(signatures, c_signatures);

  std::string cls_clip, cls_store, cls_probe;
  CLI::App* classify =
      app.add_subcommand("classify", "Match a clip against a signature store");
  classify->add_option("--clip", cls_clip, "Pitch CSV of the clip");
  classify->add_option("--store", cls_store, "Signature store JSON")
      ->required();
  classify->add_option("--probe-stats", cls_probe,
                       "CSV of probe SD/MSSD rows (raga,emotion,sd,mssd)");
  add_common(classify, c_classify);

  std::string evo_manifest, evo_reference;
  CLI::App* evolve =
      app.add_subcommand("evolve", "Rank evolution statistics from a manifest");
  evolve->add_option("--manifest", evo_manifest, "Dataset manifest JSON")
      ->required();
  evolve->add_option("--reference", evo_reference,
                     "Published evolution reference JSON to compare against");
  add_common(evolve, c_evolve);

  std::string trk_prev, trk_now, trk_shifts;
  CLI::App* track =
      app.add_subcommand("track", "SD/MSSD direction between two epochs");
  track->add_option("--previous", trk_prev, "Previous-epoch store JSON")
      ->required();
  track->add_option("--present", trk_now, "Present-epoch store JSON")
      ->required();
  track->add_option("--rank-shifts", trk_shifts,
                    "CSV of per-emotion mean rank shifts "
                    "(emotion,mean_shift,...)");
  add_common(track, c_track);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      c_extract.resolve();
      return cmd_extract(extract_files, extract_segments, c_extract);
    }
    if (*describe_cmd) {
      c_describe.resolve();
      return cmd_describe(describe_files, describe_output, c_describe);
    }
    if (*signatures) {
      c_signatures.resolve();
      return cmd_signatures(sig_manifest, sig_label_source, c_signatures);
    }
    if (*classify) {
      if (cls_clip.empty() && cls_probe.empty())
        throw Error("classify needs --clip and/or --probe-stats");
      c_classify.resolve();
      return cmd_classify(cls_clip, cls_store, cls_probe, c_classify);
    }
    if (*evolve) {
      c_evolve.resolve();
      return cmd_evolve(evo_manifest, evo_reference, c_evolve);
    }
    if (*track) {
      c_track.resolve();
      return cmd_track(trk_prev, trk_now, trk_shifts, c_track);
    }
  } catch (const InsufficientData& e) {
    std::cerr << "error: insufficient data: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
