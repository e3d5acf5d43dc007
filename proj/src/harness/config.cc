//
// Copyright 2026 The wmcollide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "wmcollide/config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "wmcollide/error.h"
#include "wmcollide/vocabulary.h"

namespace wmcollide {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void Fail(int line, const std::string& what) {
  throw Error(ErrorCode::kBadConfig, "config line " + std::to_string(line) + ": " + what);
}

// A raw right-hand side plus the line it came from, with typed accessors.
struct Value {
  std::string_view text;
  int line;

  double Number() const {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) Fail(line, "expected a number, got '" + std::string(text) + "'");
    return v;
  }

  int64_t Integer() const {
    int64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) Fail(line, "expected an integer, got '" + std::string(text) + "'");
    return v;
  }

  int Int() const {
    const int64_t v = Integer();
    if (v < INT32_MIN || v > INT32_MAX) Fail(line, "integer out of range");
    return static_cast<int>(v);
  }

  uint64_t Unsigned() const {
    uint64_t v = 0;
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) Fail(line, "expected an unsigned integer, got '" + std::string(text) + "'");
    return v;
  }

  bool Bool() const {
    if (text == "true") return true;
    if (text == "false") return false;
    Fail(line, "expected true or false, got '" + std::string(text) + "'");
  }

  std::string String() const {
    if (text.size() < 2 || text.front() != '"' || text.back() != '"') {
      Fail(line, "expected a quoted string, got '" + std::string(text) + "'");
    }
    std::string out;
    for (size_t i = 1; i + 1 < text.size(); ++i) {
      char c = text[i];
      if (c == '\\') {
        if (i + 2 >= text.size()) Fail(line, "dangling escape");
        c = text[++i];
        if (c != '\\' && c != '"') Fail(line, "unsupported escape");
      } else if (c == '"') {
        Fail(line, "unescaped quote inside string");
      }
      out.push_back(c);
    }
    return out;
  }

  // A quoted string or a bare word such as kgw.
  std::string Word() const {
    if (!text.empty() && text.front() == '"') return String();
    if (text.empty()) Fail(line, "expected a word");
    for (char c : text) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '/' && c != '-' &&
          c != '.') {
        Fail(line, "expected a word or quoted string, got '" + std::string(text) + "'");
      }
    }
    return std::string(text);
  }

  std::vector<Value> List() const {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
      Fail(line, "expected a [list], got '" + std::string(text) + "'");
    }
    std::vector<Value> items;
    std::string_view body = Trim(text.substr(1, text.size() - 2));
    if (body.empty()) return items;
    size_t start = 0;
    bool quoted = false;
    for (size_t i = 0; i <= body.size(); ++i) {
      if (i < body.size() && body[i] == '"' && (i == 0 || body[i - 1] != '\\')) quoted = !quoted;
      if (i == body.size() || (body[i] == ',' && !quoted)) {
        const auto item = Trim(body.substr(start, i - start));
        if (item.empty()) Fail(line, "empty list element");
        items.push_back({item, line});
        start = i + 1;
      }
    }
    return items;
  }
};

std::string Quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Position of a '#' that is not inside a quoted string, or npos.
size_t CommentStart(std::string_view line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return i;
  }
  return std::string_view::npos;
}

using LmSetter = std::function<void(LmConfig&, const Value&)>;

const std::map<std::string, LmSetter, std::less<>>& LmSetters() {
  static const auto* setters = new std::map<std::string, LmSetter, std::less<>>{
      {"corpus", [](LmConfig& c, const Value& v) { c.corpus = v.String(); }},
      {"order", [](LmConfig& c, const Value& v) { c.order = v.Int(); }},
      {"alpha", [](LmConfig& c, const Value& v) { c.alpha = v.Number(); }},
      {"max_vocab", [](LmConfig& c, const Value& v) { c.max_vocab = v.Int(); }},
      {"synthetic_seed", [](LmConfig& c, const Value& v) { c.synthetic_seed = v.Unsigned(); }},
      {"synthetic_tokens", [](LmConfig& c, const Value& v) { c.synthetic_tokens = v.Int(); }},
  };
  return *setters;
}

template <typename F>
auto ParseWord(const Value& v, F parse) {
  const std::string word = v.Word();
  try {
    return parse(word);
  } catch (const Error& e) {
    Fail(v.line, e.message());
  }
}

using Setter = std::function<void(ExperimentConfig&, const Value&)>;

const std::map<std::string, Setter, std::less<>>& Setters() {
  static const auto* setters = new std::map<std::string, Setter, std::less<>>{
      {"kinds",
       [](ExperimentConfig& c, const Value& v) {
         c.kinds.clear();
         for (const auto& item : v.List()) {
           c.kinds.push_back(ParseWord(item, ParseKind));
         }
       }},
      {"strengths",
       [](ExperimentConfig& c, const Value& v) {
         c.strengths.clear();
         for (const auto& item : v.List()) {
           c.strengths.push_back(ParseWord(item, ParseStrength));
         }
       }},
      {"watermarker_key", [](ExperimentConfig& c, const Value& v) { c.watermarker_key = v.Unsigned(); }},
      {"paraphraser_key", [](ExperimentConfig& c, const Value& v) { c.paraphraser_key = v.Unsigned(); }},
      {"weak_delta", [](ExperimentConfig& c, const Value& v) { c.weak_delta = v.Number(); }},
      {"strong_delta", [](ExperimentConfig& c, const Value& v) { c.strong_delta = v.Number(); }},
      {"kgw_gamma", [](ExperimentConfig& c, const Value& v) { c.kgw_gamma = v.Number(); }},
      {"prw_gamma", [](ExperimentConfig& c, const Value& v) { c.prw_gamma = v.Number(); }},
      {"sir_gamma", [](ExperimentConfig& c, const Value& v) { c.sir_gamma = v.Number(); }},
      {"kgw_seeding",
       [](ExperimentConfig& c, const Value& v) {
         c.kgw_seeding = ParseWord(v, ParseSeeding);
       }},
      {"sir_chunk_length", [](ExperimentConfig& c, const Value& v) { c.sir_chunk_length = v.Int(); }},
      {"include_sir_pairs", [](ExperimentConfig& c, const Value& v) { c.include_sir_pairs = v.Bool(); }},
      {"n_samples", [](ExperimentConfig& c, const Value& v) { c.n_samples = v.Int(); }},
      {"n_calibration", [](ExperimentConfig& c, const Value& v) { c.n_calibration = v.Int(); }},
      {"max_new_tokens", [](ExperimentConfig& c, const Value& v) { c.max_new_tokens = v.Int(); }},
      {"temperature", [](ExperimentConfig& c, const Value& v) { c.temperature = v.Number(); }},
      {"fpr_targets",
       [](ExperimentConfig& c, const Value& v) {
         c.fpr_targets.clear();
         for (const auto& item : v.List()) c.fpr_targets.push_back(item.Number());
       }},
      {"retention_rate", [](ExperimentConfig& c, const Value& v) { c.retention_rate = v.Number(); }},
      {"span_length", [](ExperimentConfig& c, const Value& v) { c.span_length = v.Int(); }},
      {"retention_slack", [](ExperimentConfig& c, const Value& v) { c.retention_slack = v.Number(); }},
      {"copy_weight", [](ExperimentConfig& c, const Value& v) { c.copy_weight = v.Number(); }},
      {"sharpness", [](ExperimentConfig& c, const Value& v) { c.sharpness = v.Number(); }},
      {"z_threshold_kgw", [](ExperimentConfig& c, const Value& v) { c.z_threshold_kgw = v.Number(); }},
      {"z_threshold_prw", [](ExperimentConfig& c, const Value& v) { c.z_threshold_prw = v.Number(); }},
      {"z_threshold_sir", [](ExperimentConfig& c, const Value& v) { c.z_threshold_sir = v.Number(); }},
      {"filter_max_attempts", [](ExperimentConfig& c, const Value& v) { c.filter_max_attempts = v.Int(); }},
      {"reference_paraphraser",
       [](ExperimentConfig& c, const Value& v) { c.reference_paraphraser = v.Word(); }},
      {"seed", [](ExperimentConfig& c, const Value& v) { c.seed = v.Unsigned(); }},
      {"out_dir", [](ExperimentConfig& c, const Value& v) { c.out_dir = v.String(); }},
      {"workers", [](ExperimentConfig& c, const Value& v) { c.workers = v.Int(); }},
  };
  return *setters;
}

void ValidateLm(const LmConfig& lm, const char* slot) {
  const std::string where = std::string(slot) + ".";
  if (lm.order < 0 || lm.order > 16) throw Error(ErrorCode::kBadConfig, where + "order must be in [0, 16]");
  if (!(lm.alpha > 0.0)) throw Error(ErrorCode::kBadConfig, where + "alpha must be > 0");
  if (lm.max_vocab < 4) throw Error(ErrorCode::kBadConfig, where + "max_vocab must be >= 4");
  if (lm.corpus.empty() && lm.synthetic_tokens < 1000) {
    throw Error(ErrorCode::kBadConfig, where + "synthetic_tokens must be >= 1000");
  }
}

void AppendLm(std::ostringstream& out, const char* slot, const LmConfig& lm) {
  out << slot << ".corpus = " << Quote(lm.corpus) << "\n"
      << slot << ".order = " << lm.order << "\n"
      << slot << ".alpha = " << FormatDouble(lm.alpha) << "\n"
      << slot << ".max_vocab = " << lm.max_vocab << "\n"
      << slot << ".synthetic_seed = " << lm.synthetic_seed << "\n"
      << slot << ".synthetic_tokens = " << lm.synthetic_tokens << "\n";
}

}  // namespace

SchemeConfig ExperimentConfig::MakeScheme(SchemeKind kind, Strength strength, uint64_t key) const {
  SchemeConfig c = SchemeConfig::Preset(kind, strength, key);
  c.delta = strength == Strength::kWeak ? weak_delta : strong_delta;
  switch (kind) {
    case SchemeKind::kKgwLike:
      c.gamma = kgw_gamma;
      c.seeding = kgw_seeding;
      break;
    case SchemeKind::kPrwLike:
      c.gamma = prw_gamma;
      break;
    case SchemeKind::kSirLike:
      c.gamma = sir_gamma;
      c.chunk_length = sir_chunk_length;
      break;
  }
  return c;
}

std::vector<SchemeConfig> ExperimentConfig::Watermarkers() const {
  std::vector<SchemeConfig> out;
  for (auto k : kinds) {
    for (auto s : strengths) out.push_back(MakeScheme(k, s, watermarker_key));
  }
  return out;
}

std::vector<SchemeConfig> ExperimentConfig::Paraphrasers() const {
  std::vector<SchemeConfig> out;
  for (auto k : kinds) {
    for (auto s : strengths) out.push_back(MakeScheme(k, s, paraphraser_key));
  }
  return out;
}

double ExperimentConfig::ZThreshold(SchemeKind kind) const {
  switch (kind) {
    case SchemeKind::kKgwLike:
      return z_threshold_kgw;
    case SchemeKind::kPrwLike:
      return z_threshold_prw;
    case SchemeKind::kSirLike:
      return z_threshold_sir;
  }
  return 0.0;
}

void ExperimentConfig::Validate() const {
  ValidateLm(lm, "lm");
  if (paraphraser_lm) ValidateLm(*paraphraser_lm, "paraphraser_lm");
  if (kinds.empty()) throw Error(ErrorCode::kBadConfig, "kinds must not be empty");
  if (strengths.empty()) throw Error(ErrorCode::kBadConfig, "strengths must not be empty");
  if (std::set<SchemeKind>(kinds.begin(), kinds.end()).size() != kinds.size()) {
    throw Error(ErrorCode::kBadConfig, "kinds contains duplicates");
  }
  if (std::set<Strength>(strengths.begin(), strengths.end()).size() != strengths.size()) {
    throw Error(ErrorCode::kBadConfig, "strengths contains duplicates");
  }
  if (watermarker_key == paraphraser_key) {
    throw Error(ErrorCode::kBadConfig, "watermarker_key and paraphraser_key must differ");
  }
  for (const auto& s : Watermarkers()) s.Validate();
  for (const auto& s : Paraphrasers()) s.Validate();
  if (n_samples < 1) throw Error(ErrorCode::kBadConfig, "n_samples must be >= 1");
  if (n_calibration < 100) throw Error(ErrorCode::kBadConfig, "n_calibration must be >= 100");
  if (max_new_tokens < 8) throw Error(ErrorCode::kBadConfig, "max_new_tokens must be >= 8");
  if (!(temperature > 0.0)) throw Error(ErrorCode::kBadConfig, "temperature must be > 0");
  if (fpr_targets.empty()) throw Error(ErrorCode::kBadConfig, "fpr_targets must not be empty");
  for (size_t i = 0; i < fpr_targets.size(); ++i) {
    if (!(fpr_targets[i] > 0.0 && fpr_targets[i] < 1.0)) {
      throw Error(ErrorCode::kBadConfig, "fpr_targets must lie in (0, 1)");
    }
    if (i > 0 && !(fpr_targets[i] > fpr_targets[i - 1])) {
      throw Error(ErrorCode::kBadConfig, "fpr_targets must be strictly ascending");
    }
  }
  if (!(retention_rate >= 0.0 && retention_rate <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "retention_rate must be in [0, 1]");
  }
  if (span_length < 1) throw Error(ErrorCode::kBadConfig, "span_length must be >= 1");
  if (!(retention_slack >= 0.0 && retention_slack <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "retention_slack must be in [0, 1]");
  }
  if (!(copy_weight >= 0.0 && copy_weight <= 1.0)) {
    throw Error(ErrorCode::kBadConfig, "copy_weight must be in [0, 1]");
  }
  if (!(sharpness > 0.0)) throw Error(ErrorCode::kBadConfig, "sharpness must be > 0");
  if (filter_max_attempts < 1) throw Error(ErrorCode::kBadConfig, "filter_max_attempts must be >= 1");
  if (workers < 0) throw Error(ErrorCode::kBadConfig, "workers must be >= 0");
  const SchemeConfig reference = ReferenceParaphraser();
  if (std::find(kinds.begin(), kinds.end(), reference.kind) == kinds.end() ||
      std::find(strengths.begin(), strengths.end(), reference.strength) == strengths.end()) {
    throw Error(ErrorCode::kBadConfig, "reference_paraphraser is not in the scheme grid");
  }
}

SchemeConfig ExperimentConfig::ReferenceParaphraser() const {
  const auto slash = reference_paraphraser.find('/');
  if (slash == std::string::npos) {
    throw Error(ErrorCode::kBadConfig, "reference_paraphraser must look like kind/strength");
  }
  return MakeScheme(ParseKind(reference_paraphraser.substr(0, slash)),
                    ParseStrength(reference_paraphraser.substr(slash + 1)), paraphraser_key);
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> seen;
  std::vector<std::pair<std::string, Value>> paraphraser_lm_entries;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto c = CommentStart(line); c != std::string_view::npos) line = line.substr(0, c);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) Fail(line_no, "expected key = value");
    const std::string key(Trim(line.substr(0, eq)));
    const Value value{Trim(line.substr(eq + 1)), line_no};
    if (key.empty() || value.text.empty()) Fail(line_no, "expected key = value");
    if (!seen.insert(key).second) Fail(line_no, "duplicate key '" + key + "'");

    constexpr std::string_view kLm = "lm.";
    constexpr std::string_view kParaLm = "paraphraser_lm.";
    if (key.starts_with(kLm)) {
      const auto it = LmSetters().find(std::string_view(key).substr(kLm.size()));
      if (it == LmSetters().end()) Fail(line_no, "unknown key '" + key + "'");
      it->second(config.lm, value);
    } else if (key.starts_with(kParaLm)) {
      const auto field = key.substr(kParaLm.size());
      if (LmSetters().find(field) == LmSetters().end()) Fail(line_no, "unknown key '" + key + "'");
      paraphraser_lm_entries.emplace_back(field, value);
    } else {
      const auto it = Setters().find(key);
      if (it == Setters().end()) Fail(line_no, "unknown key '" + key + "'");
      it->second(config, value);
    }
  }
  // Unset paraphraser fields inherit from lm, wherever they appear in the file.
  if (!paraphraser_lm_entries.empty()) {
    LmConfig p = config.lm;
    for (const auto& [field, value] : paraphraser_lm_entries) LmSetters().find(field)->second(p, value);
    config.paraphraser_lm = p;
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  return ParseConfig(ReadTextFile(path));
}

std::string FormatConfig(const ExperimentConfig& c) {
  std::ostringstream out;
  AppendLm(out, "lm", c.lm);
  if (c.paraphraser_lm) AppendLm(out, "paraphraser_lm", *c.paraphraser_lm);
  auto list = [&](const auto& items, auto name) {
    std::string s = "[";
    for (size_t i = 0; i < items.size(); ++i) {
      if (i > 0) s += ", ";
      s += name(items[i]);
    }
    return s + "]";
  };
  out << "kinds = " << list(c.kinds, [](SchemeKind k) { return Quote(KindName(k)); }) << "\n"
      << "strengths = " << list(c.strengths, [](Strength s) { return Quote(StrengthName(s)); }) << "\n"
      << "watermarker_key = " << c.watermarker_key << "\n"
      << "paraphraser_key = " << c.paraphraser_key << "\n"
      << "weak_delta = " << FormatDouble(c.weak_delta) << "\n"
      << "strong_delta = " << FormatDouble(c.strong_delta) << "\n"
      << "kgw_gamma = " << FormatDouble(c.kgw_gamma) << "\n"
      << "prw_gamma = " << FormatDouble(c.prw_gamma) << "\n"
      << "sir_gamma = " << FormatDouble(c.sir_gamma) << "\n"
      << "kgw_seeding = " << Quote(SeedingName(c.kgw_seeding)) << "\n"
      << "sir_chunk_length = " << c.sir_chunk_length << "\n"
      << "include_sir_pairs = " << (c.include_sir_pairs ? "true" : "false") << "\n"
      << "n_samples = " << c.n_samples << "\n"
      << "n_calibration = " << c.n_calibration << "\n"
      << "max_new_tokens = " << c.max_new_tokens << "\n"
      << "temperature = " << FormatDouble(c.temperature) << "\n"
      << "fpr_targets = " << list(c.fpr_targets, [](double v) { return FormatDouble(v); }) << "\n"
      << "retention_rate = " << FormatDouble(c.retention_rate) << "\n"
      << "span_length = " << c.span_length << "\n"
      << "retention_slack = " << FormatDouble(c.retention_slack) << "\n"
      << "copy_weight = " << FormatDouble(c.copy_weight) << "\n"
      << "sharpness = " << FormatDouble(c.sharpness) << "\n"
      << "z_threshold_kgw = " << FormatDouble(c.z_threshold_kgw) << "\n"
      << "z_threshold_prw = " << FormatDouble(c.z_threshold_prw) << "\n"
      << "z_threshold_sir = " << FormatDouble(c.z_threshold_sir) << "\n"
      << "filter_max_attempts = " << c.filter_max_attempts << "\n"
      << "reference_paraphraser = " << Quote(c.reference_paraphraser) << "\n"
      << "seed = " << c.seed << "\n"
      << "out_dir = " << Quote(c.out_dir) << "\n"
      << "workers = " << c.workers << "\n";
  return out.str();
}

std::string DefaultOutDir() {
  if (const char* env = std::getenv("WMCOLLIDE_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "wmcollide_out";
}

}  // namespace wmcollide
