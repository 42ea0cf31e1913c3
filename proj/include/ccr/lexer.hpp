#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccr/error.hpp"

namespace ccr {

enum class TokenKind { identifier, number, string, punct, keyword };

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::string: return "string";
    case TokenKind::punct: return "punctuation";
    case TokenKind::keyword: return "keyword";
  }
  return "?";
}

struct Token {
  TokenKind kind = TokenKind::punct;
  std::string lexeme;  // string literals without their quotes
  SourceLoc loc;
  std::size_t offset = 0;  // byte span in the source, quotes included
  std::size_t length = 0;

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool is_punct(char c) const { return kind == TokenKind::punct && lexeme.size() == 1 && lexeme[0] == c; }
};

inline constexpr std::array<std::string_view, 4> kKeywords{"let", "proc", "repeat", "robot"};

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace detail

/// Splits script text into tokens; `//` comments and whitespace are skipped.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int column = 1;

  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      unsigned char c = static_cast<unsigned char>(src[i]);
      if (c == '\n') {
        ++line;
        column = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column;  // count code points, not continuation bytes
      }
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') bump(1);
      continue;
    }

    Token tok;
    tok.loc = {line, column};
    tok.offset = i;
    std::size_t j = i;

    if (detail::is_ident_start(c)) {
      while (j < src.size() && detail::is_ident_char(src[j])) ++j;
      tok.lexeme = std::string(src.substr(i, j - i));
      tok.kind = TokenKind::identifier;
      for (auto kw : kKeywords) {
        if (tok.lexeme == kw) tok.kind = TokenKind::keyword;
      }
    } else if (detail::is_digit(c) || (c == '.' && j + 1 < src.size() && detail::is_digit(src[j + 1]))) {
      while (j < src.size() && detail::is_digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && detail::is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && detail::is_digit(src[k])) {
          j = k;
          while (j < src.size() && detail::is_digit(src[j])) ++j;
        }
      }
      tok.kind = TokenKind::number;
      tok.lexeme = std::string(src.substr(i, j - i));
    } else if (c == '"') {
      ++j;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') throw SyntaxError("unterminated string literal", tok.loc);
      tok.kind = TokenKind::string;
      tok.lexeme = std::string(src.substr(i + 1, j - i - 1));
      ++j;
    } else if (std::string_view("(){},;=+-*/").find(c) != std::string_view::npos) {
      tok.kind = TokenKind::punct;
      tok.lexeme = std::string(1, c);
      ++j;
    } else {
      std::string shown = (static_cast<unsigned char>(c) < 0x80 && std::isprint(static_cast<unsigned char>(c)))
                              ? std::string(1, c)
                              : "byte 0x" + std::string(1, "0123456789abcdef"[(c >> 4) & 0xF]) +
                                    std::string(1, "0123456789abcdef"[c & 0xF]);
      throw SyntaxError("invalid character '" + shown + "'", tok.loc);
    }

    tok.length = j - i;
    bump(j - i);
    out.push_back(std::move(tok));
  }
  return out;
}

/// Source text that tokenizes back to the same lexemes.
inline std::string detokenize(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    if (t.kind == TokenKind::string) {
      out += '"';
      out += t.lexeme;
      out += '"';
    } else {
      out += t.lexeme;
    }
  }
  return out;
}

inline double parse_number(const Token& tok) {
  double value = 0.0;
  const char* first = tok.lexeme.data();
  const char* last = first + tok.lexeme.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw SyntaxError("malformed number '" + tok.lexeme + "'", tok.loc);
  return value;
}

}  // namespace ccr
