#ifndef NWS_CORPUS_HPP
#define NWS_CORPUS_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "nws/embeddings.hpp"
#include "nws/error.hpp"
#include "nws/io.hpp"
#include "nws/rng.hpp"
#include "nws/tokenizer.hpp"

namespace nws {

using SentenceId = std::uint32_t;

struct Sentence {
  std::vector<WordId> token_ids;  // in-vocabulary tokens, source order
  std::vector<WordId> word_set;   // sorted distinct token_ids

  static Sentence from_tokens(std::vector<WordId> ids) {
    Sentence s;
    s.word_set = ids;
    std::sort(s.word_set.begin(), s.word_set.end());
    s.word_set.erase(std::unique(s.word_set.begin(), s.word_set.end()), s.word_set.end());
    s.token_ids = std::move(ids);
    return s;
  }

  bool trainable() const { return !token_ids.empty(); }
};

/// Half-open range of global sentence ids belonging to one document.
struct DocumentRange {
  SentenceId begin = 0;
  SentenceId end = 0;
  std::size_t size() const { return end - begin; }
};

/// Ordered documents of ordered sentences. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::size_t vocab_size) : vocab_size_(vocab_size) {}

  /// Appends a document; empty documents are ignored.
  void add_document(std::vector<Sentence> sentences) {
    if (sentences.empty()) return;
    DocumentRange range{static_cast<SentenceId>(sentences_.size()), 0};
    for (auto& s : sentences) {
      for (WordId id : s.token_ids) {
        if (id >= vocab_size_) throw ConfigError("token id outside vocabulary");
      }
      if (s.trainable()) trainable_.push_back(static_cast<SentenceId>(sentences_.size()));
      document_of_.push_back(documents_.size());
      sentences_.push_back(std::move(s));
    }
    range.end = static_cast<SentenceId>(sentences_.size());
    documents_.push_back(range);
  }

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t sentence_count() const { return sentences_.size(); }
  const std::vector<DocumentRange>& documents() const { return documents_; }
  const Sentence& sentence(SentenceId id) const { return sentences_.at(id); }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  const std::vector<SentenceId>& trainable_ids() const { return trainable_; }

  std::size_t document_of(SentenceId id) const { return document_of_.at(id); }
  const DocumentRange& document_range(SentenceId id) const {
    return documents_[document_of(id)];
  }
  std::size_t local_index(SentenceId id) const { return id - document_range(id).begin; }

  /// True iff a and b are consecutive sentences of one document.
  bool adjacent(SentenceId a, SentenceId b) const {
    if (document_of(a) != document_of(b)) return false;
    return a + 1 == b || b + 1 == a;
  }

 private:
  std::size_t vocab_size_ = 0;
  std::vector<Sentence> sentences_;
  std::vector<DocumentRange> documents_;
  std::vector<std::size_t> document_of_;
  std::vector<SentenceId> trainable_;
};

struct IngestReport {
  std::size_t lines = 0;
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t oov_dropped = 0;
  std::size_t empty_sentences = 0;

  void write(std::ostream& out) const {
    out << "lines: " << lines << '\n'
        << "documents: " << documents << '\n'
        << "sentences: " << sentences << '\n'
        << "tokens: " << tokens << '\n'
        << "oov_dropped: " << oov_dropped << '\n'
        << "empty_sentences: " << empty_sentences << '\n';
  }
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

/// One sentence per line, blank (or whitespace-only) line ends a document.
/// Out-of-vocabulary tokens are dropped; sentences left empty stay in place
/// but are not trainable.
inline IngestResult ingest_corpus(std::istream& in, const Vocabulary& vocab) {
  IngestResult result{Corpus(vocab.size()), {}};
  auto& report = result.report;
  std::vector<Sentence> document;
  std::string line;
  std::size_t offset = 0;

  auto flush = [&] {
    if (document.empty()) return;
    result.corpus.add_document(std::move(document));
    document.clear();
    ++report.documents;
  };

  while (std::getline(in, line)) {
    ++report.lines;
    offset += line.size() + 1;
    if (is_blank(line)) {
      flush();
      continue;
    }
    std::vector<WordId> ids;
    for (const auto& token : tokenize_sentence(line)) {
      ++report.tokens;
      if (auto id = vocab.find(token)) {
        ids.push_back(*id);
      } else {
        ++report.oov_dropped;
      }
    }
    if (ids.empty()) ++report.empty_sentences;
    document.push_back(Sentence::from_tokens(std::move(ids)));
    ++report.sentences;
  }
  if (in.bad()) {
    throw InputError("corpus read failure at byte offset " + std::to_string(offset));
  }
  flush();
  if (result.corpus.trainable_ids().empty()) throw InputError("empty corpus");
  return result;
}

inline IngestResult ingest_corpus(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus file " + path.string());
  return ingest_corpus(in, vocab);
}

/// Writes the corpus back in its line format using vocabulary words.
/// Empty sentences are written as a single token absent from `vocab` so
/// that re-ingestion reproduces the same sentence positions.
inline void write_corpus(std::ostream& out, const Corpus& corpus, const Vocabulary& vocab) {
  std::string placeholder = "__empty__";
  for (int suffix = 0; vocab.contains(placeholder); ++suffix) {
    placeholder = "__empty" + std::to_string(suffix) + "__";
  }
  bool first_doc = true;
  for (const auto& doc : corpus.documents()) {
    if (!first_doc) out << '\n';
    first_doc = false;
    for (SentenceId id = doc.begin; id < doc.end; ++id) {
      const auto& s = corpus.sentence(id);
      if (!s.trainable()) {
        out << placeholder << '\n';
        continue;
      }
      for (std::size_t i = 0; i < s.token_ids.size(); ++i) {
        if (i) out << ' ';
        out << vocab.word(s.token_ids[i]);
      }
      out << '\n';
    }
  }
}

/// Number of sentences containing each word (set membership per sentence).
inline std::vector<std::uint32_t> sentence_frequencies(const Corpus& corpus) {
  std::vector<std::uint32_t> counts(corpus.vocab_size(), 0);
  for (const auto& s : corpus.sentences()) {
    for (WordId id : s.word_set) ++counts[id];
  }
  return counts;
}

struct TrainingInstance {
  SentenceId anchor = 0;
  SentenceId candidate = 0;
  int label = 0;  // 1 = adjacent pair, 0 = random non-adjacent pair
  std::vector<SentenceId> noise;

  friend bool operator==(const TrainingInstance&, const TrainingInstance&) = default;
};

inline constexpr std::size_t kMaxNoiseSetSize = 10;

/// Uniform draw over trainable sentences that are neither the anchor nor
/// one of its in-document neighbours.
inline SentenceId sample_negative_candidate(const Corpus& corpus, SentenceId anchor, Rng& rng) {
  const auto& pool = corpus.trainable_ids();
  while (true) {
    const SentenceId j = pool[rng.below(pool.size())];
    if (j != anchor && !corpus.adjacent(anchor, j)) return j;
  }
}

/// K distinct trainable sentences excluding anchor and candidate.
inline std::vector<SentenceId> sample_noise_set(const Corpus& corpus, SentenceId anchor,
                                                SentenceId candidate, std::size_t k, Rng& rng) {
  const auto& pool = corpus.trainable_ids();
  std::vector<SentenceId> noise;
  noise.reserve(k);
  while (noise.size() < k) {
    const SentenceId j = pool[rng.below(pool.size())];
    if (j == anchor || j == candidate) continue;
    if (std::find(noise.begin(), noise.end(), j) != noise.end()) continue;
    noise.push_back(j);
  }
  return noise;
}

/// Builds every instance for one pass over the corpus, then applies a
/// seeded shuffle. Identical inputs give an identical sequence.
inline std::vector<TrainingInstance> sample_training_instances(const Corpus& corpus,
                                                               std::size_t k,
                                                               std::size_t negatives_per_anchor,
                                                               std::uint64_t seed) {
  if (k < 1 || k > kMaxNoiseSetSize) throw ConfigError("K must be in [1, 10]");
  if (corpus.trainable_ids().size() < k + 3) {
    throw ConfigError("corpus too small: need at least K + 3 = " + std::to_string(k + 3) +
                      " trainable sentences, have " +
                      std::to_string(corpus.trainable_ids().size()));
  }
  Rng rng(seed);
  std::vector<TrainingInstance> instances;
  auto emit = [&](SentenceId anchor, SentenceId candidate, int label) {
    instances.push_back({anchor, candidate, label, sample_noise_set(corpus, anchor, candidate, k, rng)});
  };

  for (SentenceId anchor : corpus.trainable_ids()) {
    const auto& doc = corpus.document_range(anchor);
    if (anchor > doc.begin && corpus.sentence(anchor - 1).trainable()) emit(anchor, anchor - 1, 1);
    if (anchor + 1 < doc.end && corpus.sentence(anchor + 1).trainable()) emit(anchor, anchor + 1, 1);
    for (std::size_t n = 0; n < negatives_per_anchor; ++n) {
      emit(anchor, sample_negative_candidate(corpus, anchor, rng), 0);
    }
  }
  rng.shuffle(std::span<TrainingInstance>(instances));
  return instances;
}

}  // namespace nws

#endif  // NWS_CORPUS_HPP
