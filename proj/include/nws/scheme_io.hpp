#ifndef NWS_SCHEME_IO_HPP
#define NWS_SCHEME_IO_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nws/baselines.hpp"
#include "nws/embeddings.hpp"
#include "nws/error.hpp"
#include "nws/io.hpp"
#include "nws/salience.hpp"

namespace nws {

// Score file layout (UTF-8, '\n' line ends):
//
//   #nws v1 d=<d> V=<V> seed=<seed>
//   #kind=<NWS|AVG|ISF>
//   #command=<name>
//   #config <key>=<value> ...
//   #input <name>=<path> fnv1a64=<hex>
//   #checkpoint epoch=<n>            (checkpoints only)
//   word<TAB>score[<TAB>accumulator]
//
// Rows are in word-id order. Unknown '#' lines are ignored on read.

struct InputRecord {
  std::string name;
  std::string path;
  std::uint64_t checksum = 0;
};

struct ScoreFileHeader {
  std::size_t dim = 0;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;
  SchemeKind kind = SchemeKind::NWS;
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<InputRecord> inputs;
  std::optional<std::size_t> checkpoint_epoch;
};

struct ScoreFile {
  ScoreFileHeader header;
  std::vector<std::string> words;
  std::vector<double> scores;
  std::vector<double> accumulators;  // empty unless a checkpoint

  std::unordered_map<std::string, double> as_map() const {
    std::unordered_map<std::string, double> out;
    for (std::size_t i = 0; i < words.size(); ++i) out.emplace(words[i], scores[i]);
    return out;
  }
};

inline void write_header(std::ostream& out, const ScoreFileHeader& h) {
  out << "#nws v1 d=" << h.dim << " V=" << h.vocab_size << " seed=" << h.seed << '\n';
  out << "#kind=" << to_string(h.kind) << '\n';
  if (!h.command.empty()) out << "#command=" << h.command << '\n';
  if (!h.config.empty()) {
    out << "#config";
    for (const auto& [k, v] : h.config) out << ' ' << k << '=' << v;
    out << '\n';
  }
  for (const auto& in : h.inputs) {
    out << "#input " << in.name << '=' << in.path << " fnv1a64=" << to_hex(in.checksum) << '\n';
  }
  if (h.checkpoint_epoch) out << "#checkpoint epoch=" << *h.checkpoint_epoch << '\n';
}

/// Writes one row per vocabulary word. `accumulators` is written as a third
/// column when non-empty.
inline void write_score_file(std::ostream& out, const ScoreFileHeader& header,
                             const Vocabulary& vocab, std::span<const double> scores,
                             std::span<const double> accumulators = {}) {
  if (scores.size() != vocab.size() ||
      (!accumulators.empty() && accumulators.size() != vocab.size())) {
    throw ConfigError("score column length differs from vocabulary size");
  }
  write_header(out, header);
  for (WordId id = 0; id < vocab.size(); ++id) {
    out << vocab.word(id) << '\t' << format_double(scores[id]);
    if (!accumulators.empty()) out << '\t' << format_double(accumulators[id]);
    out << '\n';
  }
}

namespace detail {

inline std::optional<SchemeKind> parse_kind(std::string_view s) {
  if (s == "NWS") return SchemeKind::NWS;
  if (s == "AVG") return SchemeKind::AVG;
  if (s == "ISF") return SchemeKind::ISF;
  return std::nullopt;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline void parse_header_line(std::string_view line, ScoreFileHeader& h) {
  auto fields = split_whitespace(line.substr(1));
  if (fields.empty()) return;
  auto value_of = [](std::string_view field, std::string_view key) -> std::optional<std::string_view> {
    if (field.size() > key.size() && field.substr(0, key.size()) == key &&
        field[key.size()] == '=') {
      return field.substr(key.size() + 1);
    }
    return std::nullopt;
  };
  if (fields[0] == "nws") {
    for (auto f : fields) {
      if (auto v = value_of(f, "d")) h.dim = parse_u64(*v).value_or(0);
      if (auto v = value_of(f, "V")) h.vocab_size = parse_u64(*v).value_or(0);
      if (auto v = value_of(f, "seed")) h.seed = parse_u64(*v).value_or(0);
    }
  } else if (auto v = value_of(fields[0], "kind")) {
    auto kind = parse_kind(*v);
    if (!kind) throw InputError("unknown scheme kind '" + std::string(*v) + "'");
    h.kind = *kind;
  } else if (auto v = value_of(fields[0], "command")) {
    h.command = std::string(*v);
  } else if (fields[0] == "config") {
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto eq = fields[i].find('=');
      if (eq == std::string_view::npos) continue;
      h.config.emplace_back(std::string(fields[i].substr(0, eq)),
                            std::string(fields[i].substr(eq + 1)));
    }
  } else if (fields[0] == "input" && fields.size() >= 3) {
    const auto eq = fields[1].find('=');
    InputRecord rec;
    rec.name = std::string(fields[1].substr(0, eq));
    if (eq != std::string_view::npos) rec.path = std::string(fields[1].substr(eq + 1));
    if (auto v = value_of(fields[2], "fnv1a64")) {
      std::uint64_t sum = 0;
      std::from_chars(v->data(), v->data() + v->size(), sum, 16);
      rec.checksum = sum;
    }
    h.inputs.push_back(std::move(rec));
  } else if (fields[0] == "checkpoint" && fields.size() >= 2) {
    if (auto v = value_of(fields[1], "epoch")) h.checkpoint_epoch = parse_u64(*v);
  }
}

}  // namespace detail

/// Reads a score file. Headerless "word<TAB>score" files are accepted and
/// treated as NWS scores.
inline ScoreFile read_score_file(std::istream& in) {
  ScoreFile out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      detail::parse_header_line(line, out.header);
      continue;
    }
    const auto cols = split_on(line, '\t');
    if (cols.size() < 2 || cols.size() > 3) {
      throw InputError("score file line " + std::to_string(line_no) + ": expected 2 or 3 columns");
    }
    auto score = parse_double(cols[1]);
    if (!score || !std::isfinite(*score)) {
      throw InputError("score file line " + std::to_string(line_no) + ": bad score");
    }
    out.words.emplace_back(cols[0]);
    out.scores.push_back(*score);
    if (cols.size() == 3) {
      auto acc = parse_double(cols[2]);
      if (!acc || !(*acc >= 0.0)) {
        throw InputError("score file line " + std::to_string(line_no) + ": bad accumulator");
      }
      out.accumulators.push_back(*acc);
    }
  }
  if (in.bad()) throw InputError("read failure on score file");
  if (!out.accumulators.empty() && out.accumulators.size() != out.scores.size()) {
    throw InputError("score file mixes 2- and 3-column rows");
  }
  return out;
}

inline ScoreFile read_score_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open score file " + path.string());
  return read_score_file(in);
}

/// Aligns a score file with `vocab`. Words without a score get NaN.
inline WeightingScheme to_scheme(const ScoreFile& file, const Vocabulary& vocab) {
  WeightingScheme scheme{file.header.kind,
                         std::vector<double>(vocab.size(), std::numeric_limits<double>::quiet_NaN())};
  for (std::size_t i = 0; i < file.words.size(); ++i) {
    if (auto id = vocab.find(file.words[i])) scheme.scores[*id] = file.scores[i];
  }
  return scheme;
}

/// Rebuilds a training state from a checkpoint written for `vocab`.
inline SalienceTable to_salience_table(const ScoreFile& file, const Vocabulary& vocab) {
  if (file.words.size() != vocab.size()) {
    throw InputError("checkpoint vocabulary size differs from embeddings");
  }
  SalienceTable table;
  table.q = file.scores;
  table.accumulator =
      file.accumulators.empty() ? std::vector<double>(vocab.size(), 0.0) : file.accumulators;
  for (std::size_t i = 0; i < file.words.size(); ++i) {
    if (file.words[i] != vocab.word(static_cast<WordId>(i))) {
      throw InputError("checkpoint word order differs from embeddings at row " +
                       std::to_string(i));
    }
  }
  table.epoch_count = file.header.checkpoint_epoch.value_or(0);
  return table;
}

}  // namespace nws

#endif  // NWS_SCHEME_IO_HPP
