#ifndef NWS_EMBEDDINGS_HPP
#define NWS_EMBEDDINGS_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nws/error.hpp"
#include "nws/io.hpp"

namespace nws {

using WordId = std::uint32_t;

/// Dense bidirectional word <-> id map. Ids are assigned in insertion order.
class Vocabulary {
 public:
  /// Returns the new id, or nullopt if the word is already present.
  std::optional<WordId> add(std::string word) {
    const auto id = static_cast<WordId>(id_to_word_.size());
    auto [it, inserted] = word_to_id_.emplace(word, id);
    if (!inserted) return std::nullopt;
    id_to_word_.push_back(std::move(word));
    return id;
  }

  std::optional<WordId> find(std::string_view word) const {
    auto it = word_to_id_.find(std::string(word));
    if (it == word_to_id_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view word) const { return find(word).has_value(); }
  const std::string& word(WordId id) const { return id_to_word_.at(id); }
  std::size_t size() const { return id_to_word_.size(); }
  const std::vector<std::string>& words() const { return id_to_word_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_word_ == b.id_to_word_;
  }

 private:
  std::unordered_map<std::string, WordId> word_to_id_;
  std::vector<std::string> id_to_word_;
};

/// Row-major V x d matrix of fixed word vectors.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : values_.size() / dim_; }

  std::span<const double> row(WordId id) const {
    return {values_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }

  void append_row(std::span<const double> row) {
    if (row.size() != dim_) throw ConfigError("embedding row has wrong dimension");
    values_.insert(values_.end(), row.begin(), row.end());
  }

  std::span<const double> values() const { return values_; }

  /// Hash of the raw bytes of every entry; equal iff bitwise-equal contents.
  std::uint64_t content_checksum() const {
    Fnv1a64 hash;
    hash.update(std::string_view(reinterpret_cast<const char*>(values_.data()),
                                 values_.size() * sizeof(double)));
    return hash.digest();
  }

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.dim_ == b.dim_ && a.values_.size() == b.values_.size() &&
           std::memcmp(a.values_.data(), b.values_.data(),
                       a.values_.size() * sizeof(double)) == 0;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

struct EmbeddingLoadReport {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t skipped_malformed = 0;
  std::size_t skipped_nonfinite = 0;
  std::size_t skipped_duplicates = 0;
  bool had_count_header = false;

  std::size_t skipped() const {
    return skipped_malformed + skipped_nonfinite + skipped_duplicates;
  }
};

struct Embeddings {
  Vocabulary vocab;
  EmbeddingTable table;
  EmbeddingLoadReport report;
};

namespace detail {

inline bool is_unsigned_integer(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace detail

/// Reads "word v1 ... vd" lines. The dimension comes from the first valid
/// line; an optional word2vec-style "<count> <dim>" first line is ignored.
inline Embeddings load_embeddings(std::istream& in) {
  Embeddings out;
  auto& report = out.report;
  std::size_t dim = 0;
  std::vector<double> row;
  std::string line;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++report.lines;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;

    if (first_content_line) {
      first_content_line = false;
      if (fields.size() == 2 && detail::is_unsigned_integer(fields[0]) &&
          detail::is_unsigned_integer(fields[1])) {
        report.had_count_header = true;
        continue;
      }
    }

    const std::size_t numeric = fields.size() - 1;
    if (numeric == 0 || (dim != 0 && numeric != dim)) {
      ++report.skipped_malformed;
      continue;
    }

    row.clear();
    bool parsed = true;
    bool finite = true;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto v = parse_double(fields[i]);
      if (!v) {
        parsed = false;
        break;
      }
      if (!std::isfinite(*v)) finite = false;
      row.push_back(*v);
    }
    if (!parsed) {
      ++report.skipped_malformed;
      continue;
    }
    if (!finite) {
      ++report.skipped_nonfinite;
      continue;
    }
    if (dim == 0) {
      dim = numeric;
      out.table = EmbeddingTable(dim);
    }
    if (!out.vocab.add(std::string(fields[0]))) {
      ++report.skipped_duplicates;
      continue;
    }
    out.table.append_row(row);
    ++report.loaded;
  }
  if (in.bad()) throw InputError("read failure while loading embeddings");
  if (report.loaded == 0) throw InputError("no embeddings");
  return out;
}

inline Embeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  return load_embeddings(in);
}

inline std::optional<std::span<const double>> vector_of(const Vocabulary& vocab,
                                                         const EmbeddingTable& table,
                                                         std::string_view word) {
  auto id = vocab.find(word);
  if (!id) return std::nullopt;
  return table.row(*id);
}

/// Writes the text format accepted by load_embeddings; values use the
/// shortest round-trip representation so reloading is exact.
inline void write_embeddings(std::ostream& out, const Vocabulary& vocab,
                             const EmbeddingTable& table) {
  for (WordId id = 0; id < vocab.size(); ++id) {
    out << vocab.word(id);
    for (double v : table.row(id)) out << ' ' << format_double(v);
    out << '\n';
  }
}

// Binary cache layout (native byte order):
//   "NWSEMBC1" | u64 source checksum | u64 V | u64 d |
//   V x (u32 length, bytes) | V*d f64
inline constexpr char kEmbeddingCacheMagic[8] = {'N', 'W', 'S', 'E', 'M', 'B', 'C', '1'};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

}  // namespace detail

inline void write_embedding_cache(const std::filesystem::path& path,
                                  std::uint64_t source_checksum,
                                  const Vocabulary& vocab,
                                  const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write embedding cache " + path.string());
  out.write(kEmbeddingCacheMagic, sizeof(kEmbeddingCacheMagic));
  detail::write_pod<std::uint64_t>(out, source_checksum);
  detail::write_pod<std::uint64_t>(out, vocab.size());
  detail::write_pod<std::uint64_t>(out, table.dim());
  for (const auto& w : vocab.words()) {
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  const auto values = table.values();
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw InputError("failed writing embedding cache " + path.string());
}

/// Returns nullopt when the cache is missing, truncated, of another
/// version, or was built from a different source file.
inline std::optional<Embeddings> read_embedding_cache(const std::filesystem::path& path,
                                                      std::uint64_t expected_checksum) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[sizeof(kEmbeddingCacheMagic)];
  if (!in.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kEmbeddingCacheMagic, sizeof(magic)) != 0) {
    return std::nullopt;
  }
  std::uint64_t checksum = 0, count = 0, dim = 0;
  if (!detail::read_pod(in, checksum) || !detail::read_pod(in, count) ||
      !detail::read_pod(in, dim) || checksum != expected_checksum || dim == 0) {
    return std::nullopt;
  }
  Embeddings out;
  out.table = EmbeddingTable(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t len = 0;
    if (!detail::read_pod(in, len)) return std::nullopt;
    std::string word(len, '\0');
    if (!in.read(word.data(), len)) return std::nullopt;
    if (!out.vocab.add(std::move(word))) return std::nullopt;
  }
  std::vector<double> row(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()),
                 static_cast<std::streamsize>(dim * sizeof(double)))) {
      return std::nullopt;
    }
    out.table.append_row(row);
  }
  out.report.loaded = count;
  return out;
}

/// Loads `path`, going through `cache_path` when it holds a valid cache for
/// the current file contents and refreshing it otherwise.
inline Embeddings load_embeddings_cached(const std::filesystem::path& path,
                                         const std::filesystem::path& cache_path) {
  const auto checksum = file_checksum(path);
  if (auto cached = read_embedding_cache(cache_path, checksum)) return std::move(*cached);
  auto loaded = load_embeddings(path);
  write_embedding_cache(cache_path, checksum, loaded.vocab, loaded.table);
  return loaded;
}

}  // namespace nws

#endif  // NWS_EMBEDDINGS_HPP
