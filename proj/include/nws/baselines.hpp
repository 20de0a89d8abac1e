#ifndef NWS_BASELINES_HPP
#define NWS_BASELINES_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "nws/corpus.hpp"
#include "nws/embeddings.hpp"
#include "nws/error.hpp"
#include "nws/salience.hpp"

namespace nws {

enum class SchemeKind { NWS, AVG, ISF };

inline std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::NWS: return "NWS";
    case SchemeKind::AVG: return "AVG";
    case SchemeKind::ISF: return "ISF";
  }
  return "?";
}

/// Per-word weights used to build sentence embeddings. A NaN score marks a
/// word the scheme has no weight for; such words are dropped like OOVs.
struct WeightingScheme {
  SchemeKind kind = SchemeKind::NWS;
  std::vector<double> scores;

  bool has_score(WordId w) const { return w < scores.size() && !std::isnan(scores[w]); }
};

/// ln(1 + total / contains(w)); words never seen get ln(1 + total).
inline std::vector<double> isf_scores(std::span<const std::uint32_t> freqs,
                                      std::size_t total_sentences) {
  if (total_sentences < 1) throw ConfigError("ISF needs at least one sentence");
  const auto total = static_cast<double>(total_sentences);
  std::vector<double> out(freqs.size());
  for (std::size_t w = 0; w < freqs.size(); ++w) {
    out[w] = freqs[w] == 0 ? std::log(1.0 + total) : std::log(1.0 + total / freqs[w]);
  }
  return out;
}

inline WeightingScheme isf_scheme(const Corpus& corpus) {
  return {SchemeKind::ISF, isf_scores(sentence_frequencies(corpus), corpus.sentence_count())};
}

inline WeightingScheme avg_scheme(std::size_t vocab_size) {
  return {SchemeKind::AVG, std::vector<double>(vocab_size, 1.0)};
}

/// Arithmetic mean of the sentence's word vectors: distinct words under
/// set semantics, every token under multiset semantics.
inline std::vector<double> avg_embed(const Sentence& s, const EmbeddingTable& table,
                                     bool multiset = false) {
  if (s.word_set.empty()) throw UnembeddableSentence();
  const double n = static_cast<double>(multiset ? s.token_ids.size() : s.word_set.size());
  const double weight = 1.0 / n;
  std::vector<double> out(table.dim(), 0.0);
  for_each_word(s, multiset, [&](WordId w, double count) {
    const double scaled = count * weight;
    const auto row = table.row(w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scaled * row[i];
  });
  return out;
}

/// Sentence embedding under any scheme. AVG ignores the stored scores.
inline std::vector<double> embed_with_scheme(const Sentence& s, const WeightingScheme& scheme,
                                             const EmbeddingTable& table, bool multiset = false) {
  if (scheme.kind == SchemeKind::AVG) return avg_embed(s, table, multiset);
  return embed_sentence(s, scheme.scores, table, multiset);
}

}  // namespace nws

#endif  // NWS_BASELINES_HPP
