#ifndef NWS_EVALUATION_HPP
#define NWS_EVALUATION_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "nws/baselines.hpp"
#include "nws/corpus.hpp"
#include "nws/embeddings.hpp"
#include "nws/error.hpp"
#include "nws/io.hpp"
#include "nws/statistics.hpp"
#include "nws/tokenizer.hpp"

namespace nws {

// ---------------------------------------------------------------------------
// STS datasets
// ---------------------------------------------------------------------------

struct StsPair {
  std::string sentence_a;
  std::string sentence_b;
  double gold = 0.0;
};

struct StsDataset {
  std::string name;
  std::vector<StsPair> pairs;
  std::size_t malformed_lines = 0;
  std::size_t unannotated = 0;  // pairs with a blank gold line
};

/// "sentence_a<TAB>sentence_b<TAB>gold" per line.
inline StsDataset read_sts_tsv(std::istream& in, std::string name) {
  StsDataset ds{std::move(name), {}, 0, 0};
  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = strip_cr(raw);
    if (is_blank(line)) continue;
    const auto cols = split_on(line, '\t');
    std::optional<double> gold;
    if (cols.size() == 3) gold = parse_double(cols[2]);
    if (!gold || !std::isfinite(*gold)) {
      ++ds.malformed_lines;
      continue;
    }
    ds.pairs.push_back({std::string(cols[0]), std::string(cols[1]), *gold});
  }
  if (in.bad()) throw InputError("read failure on dataset " + ds.name);
  return ds;
}

/// SemEval layout: an input file whose first two tab-separated columns are
/// the sentences, and a gold file with one score per line. A blank gold
/// line marks an unannotated pair, which is skipped.
inline StsDataset read_sts_paired(std::istream& input, std::istream& gold, std::string name) {
  StsDataset ds{std::move(name), {}, 0, 0};
  std::string in_raw, gold_raw;
  std::size_t line_no = 0;
  while (std::getline(input, in_raw)) {
    ++line_no;
    if (!std::getline(gold, gold_raw)) {
      throw InputError(ds.name + ": gold file ends before input line " + std::to_string(line_no));
    }
    const auto gold_line = strip_cr(gold_raw);
    if (is_blank(gold_line)) {
      ++ds.unannotated;
      continue;
    }
    const auto cols = split_on(strip_cr(in_raw), '\t');
    auto fields = split_whitespace(gold_line);
    std::optional<double> score;
    if (fields.size() == 1) score = parse_double(fields[0]);
    if (cols.size() < 2 || !score || !std::isfinite(*score)) {
      ++ds.malformed_lines;
      continue;
    }
    ds.pairs.push_back({std::string(cols[0]), std::string(cols[1]), *score});
  }
  while (std::getline(gold, gold_raw)) {
    if (!is_blank(gold_raw)) throw InputError(ds.name + ": gold file has more lines than input");
  }
  if (input.bad() || gold.bad()) throw InputError("read failure on dataset " + ds.name);
  return ds;
}

/// Resolves a dataset argument:
///   "input.txt,gold.txt"  paired files
///   ".../STS.input.X.txt" paired with the sibling STS.gs.X.txt
///   anything else         three-column TSV
inline StsDataset load_sts_dataset(std::string_view spec) {
  namespace fs = std::filesystem;
  auto open = [](const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw InputError("cannot open dataset file " + p.string());
    return in;
  };
  fs::path input_path, gold_path;
  if (auto comma = spec.find(','); comma != std::string_view::npos) {
    input_path = fs::path(std::string(spec.substr(0, comma)));
    gold_path = fs::path(std::string(spec.substr(comma + 1)));
  } else {
    input_path = fs::path(std::string(spec));
    const std::string file = input_path.filename().string();
    constexpr std::string_view kInputPrefix = "STS.input.";
    if (file.rfind(kInputPrefix, 0) == 0) {
      gold_path = input_path.parent_path() / ("STS.gs." + file.substr(kInputPrefix.size()));
    }
  }

  std::string name = input_path.stem().string();
  if (name.rfind("STS.input.", 0) == 0) name = name.substr(10);

  StsDataset ds;
  if (gold_path.empty()) {
    auto in = open(input_path);
    ds = read_sts_tsv(in, name);
  } else {
    auto in = open(input_path);
    auto gs = open(gold_path);
    ds = read_sts_paired(in, gs, name);
  }
  if (ds.pairs.empty()) {
    throw InputError("dataset " + ds.name + " has no usable lines (" +
                     std::to_string(ds.malformed_lines) + " malformed)");
  }
  return ds;
}

// ---------------------------------------------------------------------------
// STS scoring
// ---------------------------------------------------------------------------

struct EvalOptions {
  bool multiset = false;
  unsigned threads = 1;
};

/// Tokenizes `text` and keeps the tokens the scheme can weight.
inline Sentence scheme_sentence(std::string_view text, const WeightingScheme& scheme,
                                const Vocabulary& vocab) {
  std::vector<WordId> ids;
  for (const auto& tok : tokenize_sentence(text)) {
    auto id = vocab.find(tok);
    if (id && scheme.has_score(*id)) ids.push_back(*id);
  }
  return Sentence::from_tokens(std::move(ids));
}

struct PairScore {
  double value = 0.0;
  bool scorable = false;
  bool degenerate = false;
};

inline PairScore score_pair(const StsPair& pair, const WeightingScheme& scheme,
                            const EmbeddingTable& table, const Vocabulary& vocab,
                            bool multiset) {
  const auto a = scheme_sentence(pair.sentence_a, scheme, vocab);
  const auto b = scheme_sentence(pair.sentence_b, scheme, vocab);
  if (a.word_set.empty() || b.word_set.empty()) return {};
  const auto c = cosine(embed_with_scheme(a, scheme, table, multiset),
                        embed_with_scheme(b, scheme, table, multiset));
  return {c.value, true, c.degenerate};
}

/// Scores every pair by cosine of scheme-weighted sentence embeddings and
/// correlates with the gold ratings. Pairs with an unembeddable side are
/// skipped. Scoring may run on several threads; the reduction is sequential
/// in input order.
inline CorrelationReport evaluate_sts(std::span<const StsPair> pairs, const WeightingScheme& scheme,
                                      const EmbeddingTable& table, const Vocabulary& vocab,
                                      const EvalOptions& options = {}) {
  std::vector<PairScore> scores(pairs.size());
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(pairs.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      scores[i] = score_pair(pairs[i], scheme, table, vocab, options.multiset);
    }
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (pairs.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk, end = std::min(pairs.size(), begin + chunk);
      workers.emplace_back([&, begin, end] {
        for (std::size_t i = begin; i < end; ++i) {
          scores[i] = score_pair(pairs[i], scheme, table, vocab, options.multiset);
        }
      });
    }
  }

  std::vector<double> system, gold;
  std::size_t skipped = 0, degenerate = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!scores[i].scorable) {
      ++skipped;
      continue;
    }
    if (scores[i].degenerate) ++degenerate;
    system.push_back(scores[i].value);
    gold.push_back(pairs[i].gold);
  }
  if (system.size() < 3) {
    throw InputError("fewer than 3 scorable pairs (" + std::to_string(skipped) + " skipped)");
  }
  auto report = correlation_report(system, gold);
  report.skipped_pairs = skipped;
  report.degenerate_vectors = degenerate;
  return report;
}

/// ISF computed over the sentences of the evaluation pairs themselves.
inline WeightingScheme isf_scheme_from_pairs(std::span<const StsPair> pairs, const Vocabulary& vocab) {
  std::vector<std::uint32_t> freqs(vocab.size(), 0);
  const auto everything = avg_scheme(vocab.size());
  for (const auto& p : pairs) {
    for (const auto* text : {&p.sentence_a, &p.sentence_b}) {
      for (WordId w : scheme_sentence(*text, everything, vocab).word_set) ++freqs[w];
    }
  }
  return {SchemeKind::ISF, isf_scores(freqs, std::max<std::size_t>(1, 2 * pairs.size()))};
}

// ---------------------------------------------------------------------------
// Psycholinguistic ratings
// ---------------------------------------------------------------------------

enum class PsychDimension { Arousal, Valence, Dominance, Concreteness, Imageability };

inline constexpr std::array<PsychDimension, 5> kAllDimensions = {
    PsychDimension::Arousal, PsychDimension::Valence, PsychDimension::Dominance,
    PsychDimension::Concreteness, PsychDimension::Imageability};

// Column order of the psycholinguistic report.
inline constexpr std::array<PsychDimension, 5> kReportOrder = {
    PsychDimension::Arousal, PsychDimension::Concreteness, PsychDimension::Dominance,
    PsychDimension::Imageability, PsychDimension::Valence};

inline std::string_view to_string(PsychDimension d) {
  switch (d) {
    case PsychDimension::Arousal: return "arousal";
    case PsychDimension::Valence: return "valence";
    case PsychDimension::Dominance: return "dominance";
    case PsychDimension::Concreteness: return "concreteness";
    case PsychDimension::Imageability: return "imageability";
  }
  return "?";
}

struct PsychRating {
  std::string word;
  std::array<std::optional<double>, 5> values;  // indexed by PsychDimension

  std::optional<double> get(PsychDimension d) const { return values[static_cast<std::size_t>(d)]; }
};

struct PsychRatings {
  std::vector<PsychRating> records;
  std::array<bool, 5> has_column{};
  std::size_t skipped_rows = 0;
};

/// CSV with a header naming `word` and any subset of the five dimensions.
/// Empty cells are missing values; rows without any value are skipped.
inline PsychRatings read_psych_csv(std::istream& in) {
  PsychRatings out;
  std::string raw;
  if (!std::getline(in, raw)) throw InputError("ratings file is empty");
  const auto header = split_on(strip_cr(raw), ',');
  std::optional<std::size_t> word_col;
  std::vector<std::optional<std::size_t>> dim_of_col(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name;
    for (char ch : header[c]) {
      if (ch != ' ' && ch != '"') name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    if (name == "word") word_col = c;
    for (auto d : kAllDimensions) {
      if (name == to_string(d)) {
        dim_of_col[c] = static_cast<std::size_t>(d);
        out.has_column[static_cast<std::size_t>(d)] = true;
      }
    }
  }
  if (!word_col) throw InputError("ratings header lacks a 'word' column");

  while (std::getline(in, raw)) {
    const auto line = strip_cr(raw);
    if (is_blank(line)) continue;
    const auto cells = split_on(line, ',');
    if (cells.size() <= *word_col || cells[*word_col].empty()) {
      ++out.skipped_rows;
      continue;
    }
    PsychRating rec{std::string(cells[*word_col]), {}};
    bool any = false, bad = false;
    for (std::size_t c = 0; c < cells.size() && c < dim_of_col.size(); ++c) {
      if (!dim_of_col[c]) continue;
      const auto fields = split_whitespace(cells[c]);
      if (fields.empty()) continue;
      auto v = fields.size() == 1 ? parse_double(fields[0]) : std::nullopt;
      if (!v || !std::isfinite(*v)) {
        bad = true;
        break;
      }
      rec.values[*dim_of_col[c]] = *v;
      any = true;
    }
    if (bad || !any) {
      ++out.skipped_rows;
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  if (in.bad()) throw InputError("read failure on ratings file");
  return out;
}

inline PsychRatings read_psych_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ratings file " + path.string());
  return read_psych_csv(in);
}

struct DimensionCorrelation {
  enum class Status { Ok, Absent, Failed };
  PsychDimension dimension = PsychDimension::Arousal;
  Status status = Status::Absent;
  CorrelationReport report;
  std::string message;  // set unless Ok
};

/// Pearson correlation between salience and each rating dimension over the
/// words present on both sides. Results are in kReportOrder.
inline std::array<DimensionCorrelation, 5> psych_correlation(
    const std::unordered_map<std::string, double>& salience, const PsychRatings& ratings) {
  std::array<DimensionCorrelation, 5> out;
  for (std::size_t i = 0; i < kReportOrder.size(); ++i) {
    const auto dim = kReportOrder[i];
    auto& res = out[i];
    res.dimension = dim;
    if (!ratings.has_column[static_cast<std::size_t>(dim)]) {
      res.status = DimensionCorrelation::Status::Absent;
      res.message = "absent";
      continue;
    }
    std::vector<double> x, y;
    for (const auto& rec : ratings.records) {
      auto rating = rec.get(dim);
      if (!rating) continue;
      auto it = salience.find(rec.word);
      if (it == salience.end()) continue;
      x.push_back(it->second);
      y.push_back(*rating);
    }
    if (x.size() < 3) {
      res.status = DimensionCorrelation::Status::Failed;
      res.message = "intersection too small (" + std::to_string(x.size()) + " words)";
      continue;
    }
    try {
      res.report = correlation_report(x, y);
      res.status = DimensionCorrelation::Status::Ok;
    } catch (const Error& e) {
      res.status = DimensionCorrelation::Status::Failed;
      res.message = e.what();
    }
  }
  return out;
}

}  // namespace nws

#endif  // NWS_EVALUATION_HPP
