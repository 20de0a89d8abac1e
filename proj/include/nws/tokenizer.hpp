#ifndef NWS_TOKENIZER_HPP
#define NWS_TOKENIZER_HPP

#include <string>
#include <string_view>
#include <vector>

namespace nws {

namespace detail {

inline bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Bytes >= 0x80 belong to UTF-8 multibyte sequences and are kept inside
// word runs so non-ASCII words survive intact.
inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

inline char ascii_lower(unsigned char c) {
  return static_cast<char>((c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c);
}

}  // namespace detail

/// Lowercases `text` and splits it into maximal word-character runs, with
/// every punctuation character emitted as its own token. Whitespace only
/// separates tokens. Lowercasing is ASCII-only; other bytes pass through.
inline std::vector<std::string> tokenize_sentence(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (detail::is_space_byte(c)) {
      ++i;
    } else if (detail::is_word_byte(c)) {
      std::string word;
      while (i < text.size() &&
             detail::is_word_byte(static_cast<unsigned char>(text[i]))) {
        word.push_back(detail::ascii_lower(static_cast<unsigned char>(text[i])));
        ++i;
      }
      tokens.push_back(std::move(word));
    } else {
      tokens.emplace_back(1, static_cast<char>(c));
      ++i;
    }
  }
  return tokens;
}

}  // namespace nws

#endif  // NWS_TOKENIZER_HPP
