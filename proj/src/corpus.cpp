// Copyright 2026 The csteval Authors
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

#include "csteval/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csteval/unicode.hpp"

namespace csteval {

namespace {

using nlohmann::json;

constexpr const char* kTsvHeader = "id\tsplit\tsource_cs\tref_en\tref_ar\taudio_path\tduration_s";

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void record_error(const std::string& path, std::size_t line,
                               const std::string& field, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": field '" << field << "': " << what;
  throw CorpusError(msg.str());
}

void check_segment(Segment& seg, const std::string& path, std::size_t line) {
  if (seg.id.empty()) record_error(path, line, "id", "must be non-empty");
  if (trimmed(seg.source_cs).empty()) {
    record_error(path, line, "source_cs", "must be non-empty after trimming");
  }
  if (seg.audio && seg.audio->duration_s <= 0.0) {
    record_error(path, line, "duration_s", "audio requires a duration > 0");
  }
}

Segment segment_from_json(const json& rec, const std::string& path, std::size_t line) {
  static const std::set<std::string> known = {"id",     "split",      "source_cs", "ref_en",
                                              "ref_ar", "audio_path", "duration_s"};
  for (const auto& [key, value] : rec.items()) {
    if (!known.count(key)) record_error(path, line, key, "unknown key");
  }
  Segment seg;
  auto str_field = [&](const char* key, bool required) -> std::optional<std::string> {
    if (!rec.contains(key) || rec[key].is_null()) {
      if (required) record_error(path, line, key, "missing required field");
      return std::nullopt;
    }
    if (!rec[key].is_string()) record_error(path, line, key, "expected a string");
    return rec[key].get<std::string>();
  };
  seg.id = *str_field("id", true);
  std::string split = *str_field("split", true);
  try {
    seg.split = split_from_string(split);
  } catch (const std::exception& e) {
    record_error(path, line, "split", e.what());
  }
  seg.source_cs = *str_field("source_cs", true);
  seg.ref_en = str_field("ref_en", false);
  seg.ref_ar = str_field("ref_ar", false);
  std::optional<std::string> audio_path = str_field("audio_path", false);
  if (audio_path && !audio_path->empty()) {
    if (!rec.contains("duration_s") || rec["duration_s"].is_null() ||
        !rec["duration_s"].is_number()) {
      record_error(path, line, "duration_s", "audio_path requires a numeric duration");
    }
    seg.audio = AudioRef{*audio_path, rec["duration_s"].get<double>()};
  }
  check_segment(seg, path, line);
  return seg;
}

std::vector<std::string> split_tsv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

Segment segment_from_tsv(const std::string& line, const std::string& path, std::size_t lineno) {
  std::vector<std::string> f = split_tsv_line(line);
  if (f.size() != 7) {
    record_error(path, lineno, "row",
                 "expected 7 tab-separated columns, got " + std::to_string(f.size()));
  }
  Segment seg;
  seg.id = f[0];
  try {
    seg.split = split_from_string(f[1]);
  } catch (const std::exception& e) {
    record_error(path, lineno, "split", e.what());
  }
  seg.source_cs = f[2];
  if (!f[3].empty()) seg.ref_en = f[3];
  if (!f[4].empty()) seg.ref_ar = f[4];
  if (!f[5].empty()) {
    double duration = 0.0;
    try {
      duration = std::stod(f[6]);
    } catch (const std::exception&) {
      record_error(path, lineno, "duration_s", "not a number: '" + f[6] + "'");
    }
    seg.audio = AudioRef{f[5], duration};
  }
  check_segment(seg, path, lineno);
  return seg;
}

void require_no_tab(const std::string& value, const std::string& field) {
  if (value.find('\t') != std::string::npos || value.find('\n') != std::string::npos) {
    throw CorpusError("TSV field '" + field + "' must not contain tabs or newlines");
  }
}

json segment_to_json(const Segment& seg) {
  json rec;
  rec["id"] = seg.id;
  rec["split"] = to_string(seg.split);
  rec["source_cs"] = seg.source_cs;
  rec["ref_en"] = seg.ref_en ? json(*seg.ref_en) : json(nullptr);
  rec["ref_ar"] = seg.ref_ar ? json(*seg.ref_ar) : json(nullptr);
  rec["audio_path"] = seg.audio ? json(seg.audio->path) : json(nullptr);
  rec["duration_s"] = seg.audio ? json(seg.audio->duration_s) : json(nullptr);
  return rec;
}

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kTest:
      return "test";
    case Split::kOther:
      return "other";
  }
  return "other";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  if (name == "other") return Split::kOther;
  throw CorpusError("unknown split '" + name + "' (want train, test or other)");
}

std::string to_string(TargetLang lang) {
  switch (lang) {
    case TargetLang::kEn: return "en";
    case TargetLang::kAr: return "ar";
    case TargetLang::kCs: return "cs";
  }
  return "en";
}

TargetLang target_lang_from_string(const std::string& name) {
  if (name == "en") return TargetLang::kEn;
  if (name == "ar") return TargetLang::kAr;
  if (name == "cs") return TargetLang::kCs;
  throw CorpusError("unknown target language '" + name + "' (want en, ar, or cs)");
}

CorpusFormat corpus_format_from_string(const std::string& name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "tsv") return CorpusFormat::kTsv;
  throw CorpusError("unknown corpus format '" + name + "' (want jsonl or tsv)");
}

Corpus::Corpus(std::string name, std::string provenance, std::vector<Segment> segments)
    : name_(std::move(name)), provenance_(std::move(provenance)), segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto [it, inserted] = index_.emplace(segments_[i].id, i);
    if (!inserted) throw CorpusError("duplicate segment id '" + segments_[i].id + "'");
  }
}

const Segment* Corpus::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &segments_[it->second];
}

std::map<Split, std::size_t> Corpus::split_counts() const {
  std::map<Split, std::size_t> counts;
  for (const Segment& seg : segments_) ++counts[seg.split];
  return counts;
}

Corpus load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file: " + path);

  std::vector<Segment> segments;
  std::string line;
  std::size_t lineno = 0;
  if (format == CorpusFormat::kTsv) {
    if (!std::getline(in, line)) throw CorpusError(path + ": missing TSV header row");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTsvHeader) {
      throw CorpusError(path + ":1: bad TSV header, expected '" + kTsvHeader + "'");
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    if (format == CorpusFormat::kJsonl) {
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) {
        record_error(path, lineno, "record", "not a JSON object");
      }
      segments.push_back(segment_from_json(rec, path, lineno));
    } else {
      segments.push_back(segment_from_tsv(line, path, lineno));
    }
  }
  std::string name = path;
  if (std::size_t slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  std::string provenance =
      path + " (" + (format == CorpusFormat::kJsonl ? "jsonl" : "tsv") + ")";
  return Corpus(name, provenance, std::move(segments));
}

void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot create corpus file: " + path);
  if (format == CorpusFormat::kJsonl) {
    for (const Segment& seg : corpus.segments()) out << segment_to_json(seg).dump() << "\n";
  } else {
    out << kTsvHeader << "\n";
    for (const Segment& seg : corpus.segments()) {
      require_no_tab(seg.id, "id");
      require_no_tab(seg.source_cs, "source_cs");
      if (seg.ref_en) require_no_tab(*seg.ref_en, "ref_en");
      if (seg.ref_ar) require_no_tab(*seg.ref_ar, "ref_ar");
      if (seg.audio) require_no_tab(seg.audio->path, "audio_path");
      std::ostringstream duration;
      if (seg.audio) duration << seg.audio->duration_s;
      out << seg.id << '\t' << to_string(seg.split) << '\t' << seg.source_cs << '\t'
          << seg.ref_en.value_or("") << '\t' << seg.ref_ar.value_or("") << '\t'
          << (seg.audio ? seg.audio->path : "") << '\t' << duration.str() << "\n";
    }
  }
  if (!out) throw CorpusError("short write to corpus file: " + path);
}

ValidationReport validate_corpus(const Corpus& corpus,
                                 const std::optional<SplitExpectation>& expectation) {
  ValidationReport report;
  report.total_segments = corpus.size();
  report.split_counts = corpus.split_counts();
  for (const Segment& seg : corpus.segments()) {
    if (!seg.ref_en || trimmed(*seg.ref_en).empty()) ++report.empty_ref_en;
    if (!seg.ref_ar || trimmed(*seg.ref_ar).empty()) ++report.empty_ref_ar;
    if (!seg.audio) ++report.missing_audio;
  }
  if (expectation) {
    for (const auto& [split, expected] : expectation->counts) {
      std::size_t actual = 0;
      if (auto it = report.split_counts.find(split); it != report.split_counts.end()) {
        actual = it->second;
      }
      if (actual != expected) {
        report.passed = false;
        report.mismatches[to_string(split)] = {expected, actual};
      }
    }
  }
  return report;
}

TokenScript classify_token_script(const std::string& token) {
  std::size_t arabic = 0, latin = 0, letters = 0;
  for (uint32_t cp : uni::decode_utf8(token)) {
    if (!uni::is_letter(cp)) continue;
    ++letters;
    if (uni::is_arabic(cp)) ++arabic;
    if (uni::is_basic_latin_letter(cp)) ++latin;
  }
  if (letters == 0) return TokenScript::kOther;
  if (arabic * 2 > letters) return TokenScript::kArabic;
  if (latin * 2 > letters) return TokenScript::kLatin;
  return TokenScript::kOther;
}

CodeSwitchStats codeswitch_stats(const Corpus& corpus, bool normalize,
                                 const NormalizationConfig& config) {
  if (corpus.empty()) throw CorpusError("codeswitch_stats: corpus is empty");

  auto prepare = [&](const std::string& text) {
    return normalize ? normalize_text(text, config) : text;
  };

  CodeSwitchStats stats;
  std::size_t arabic = 0, latin = 0, other = 0;
  std::size_t overlap_hits = 0, overlap_total = 0;
  for (const Segment& seg : corpus.segments()) {
    std::vector<std::string> tokens = whitespace_tokens(prepare(seg.source_cs));
    bool has_arabic = false, has_latin = false;
    for (const std::string& token : tokens) {
      switch (classify_token_script(token)) {
        case TokenScript::kArabic:
          ++arabic;
          has_arabic = true;
          break;
        case TokenScript::kLatin:
          ++latin;
          has_latin = true;
          break;
        case TokenScript::kOther:
          ++other;
          break;
      }
    }
    if (has_arabic && has_latin) ++stats.segments_with_switch;
    if (seg.ref_ar) {
      ++stats.overlap_segment_count;
      std::vector<std::string> ref_tokens = whitespace_tokens(prepare(*seg.ref_ar));
      std::set<std::string> ref_set(ref_tokens.begin(), ref_tokens.end());
      for (const std::string& token : tokens) {
        ++overlap_total;
        if (ref_set.count(token)) ++overlap_hits;
      }
    }
  }

  stats.total_tokens = arabic + latin + other;
  if (stats.total_tokens > 0) {
    const double total = static_cast<double>(stats.total_tokens);
    stats.arabic_token_fraction = arabic / total;
    stats.latin_token_fraction = latin / total;
    stats.other_fraction = other / total;
  }
  if (overlap_total > 0) {
    stats.word_overlap_src_to_ar = static_cast<double>(overlap_hits) / overlap_total;
  }
  return stats;
}

HypothesisSet load_hypotheses(const std::string& path, const std::string& system_id,
                              TargetLang target_lang) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open hypothesis file: " + path);
  HypothesisSet hyps;
  hyps.system_id = system_id;
  hyps.target_lang = target_lang;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trimmed(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("id") ||
        !rec["id"].is_string() || !rec.contains("text") || !rec["text"].is_string()) {
      record_error(path, lineno, "record", "expected {\"id\": str, \"text\": str}");
    }
    std::string id = rec["id"].get<std::string>();
    if (!hyps.entries.emplace(id, rec["text"].get<std::string>()).second) {
      record_error(path, lineno, "id", "duplicate hypothesis for segment '" + id + "'");
    }
  }
  return hyps;
}

void save_hypotheses(const HypothesisSet& hyps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot create hypothesis file: " + path);
  for (const auto& [id, text] : hyps.entries) {
    json rec;
    rec["id"] = id;
    rec["text"] = text;
    out << rec.dump() << "\n";
  }
  if (!out) throw CorpusError("short write to hypothesis file: " + path);
}

}  // namespace csteval
