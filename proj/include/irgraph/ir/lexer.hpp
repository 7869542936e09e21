#pragma once

#include <cctype>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "irgraph/errors.hpp"

namespace irgraph {

enum class Tok : std::uint8_t {
  Word,       // bare identifier / keyword
  GlobalId,   // @name (text excludes '@')
  LocalId,    // %name (text excludes '%')
  AttrId,     // #N    (text excludes '#')
  MetaId,     // !name or !N (text excludes '!')
  Label,      // name: (text excludes ':')
  Int,        // [-]digits
  Float,      // 1.5, 1e3, 0x... hex float forms
  Str,        // "..." (text excludes quotes, escapes kept raw)
  CStr,       // c"..." (text excludes c and quotes)
  LParen, RParen, LBrace, RBrace, LBracket, RBracket, Less, Greater,
  Comma, Equals, Star, Ellipsis,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint32_t line = 1;
  std::uint32_t col = 1;
};

// Tokenizes the textual IR dialect. Comments (';' to end of line) and
// whitespace are skipped. The lexer is eager: the full token stream is
// produced up front, which keeps the parser's lookahead trivial.
class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) break;
      out.push_back(next_token());
    }
    out.push_back(Token{Tok::End, "", line_, col_});
    return out;
  }

private:
  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '.' || c == '$' || c == '-';
  }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           c == '.' || c == '$';
  }

  Token make(Tok kind, std::string text, std::uint32_t line,
             std::uint32_t col) {
    return Token{kind, std::move(text), line, col};
  }

  // Reads a quoted string body; the raw text between quotes is preserved
  // (escape sequences are not decoded here).
  std::string read_quoted() {
    std::string s;
    advance();  // opening quote
    while (pos_ < src_.size() && src_[pos_] != '"') {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
        s.push_back(src_[pos_]);
        advance();
      }
      s.push_back(src_[pos_]);
      advance();
    }
    if (pos_ >= src_.size()) throw SyntaxError(line_, col_, "'\"'", "end of input");
    advance();  // closing quote
    return s;
  }

  std::string read_sigil_name() {
    advance();  // sigil
    if (pos_ < src_.size() && src_[pos_] == '"') return read_quoted();
    std::string s;
    while (pos_ < src_.size() && ident_char(src_[pos_])) {
      s.push_back(src_[pos_]);
      advance();
    }
    return s;
  }

  Token lex_number(std::uint32_t line, std::uint32_t col) {
    std::string s;
    if (src_[pos_] == '-' || src_[pos_] == '+') {
      s.push_back(src_[pos_]);
      advance();
    }
    // Hex float forms: 0x..., 0xH..., 0xK..., 0xL..., 0xM..., 0xR...
    if (pos_ + 1 < src_.size() && src_[pos_] == '0' &&
        (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
      s += "0x";
      advance();
      advance();
      if (pos_ < src_.size() && std::strchr("HKLMR", src_[pos_]) != nullptr) {
        s.push_back(src_[pos_]);
        advance();
      }
      while (pos_ < src_.size() &&
             std::isxdigit(static_cast<unsigned char>(src_[pos_]))) {
        s.push_back(src_[pos_]);
        advance();
      }
      return make(Tok::Float, std::move(s), line, col);
    }
    bool is_float = false;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      s.push_back(src_[pos_]);
      advance();
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_float = true;
      s.push_back('.');
      advance();
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        s.push_back(src_[pos_]);
        advance();
      }
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      is_float = true;
      s.push_back(src_[pos_]);
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
        s.push_back(src_[pos_]);
        advance();
      }
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        s.push_back(src_[pos_]);
        advance();
      }
    }
    // Integer immediately followed by ':' is a numbered block label.
    if (!is_float && pos_ < src_.size() && src_[pos_] == ':') {
      advance();
      return make(Tok::Label, std::move(s), line, col);
    }
    return make(is_float ? Tok::Float : Tok::Int, std::move(s), line, col);
  }

  Token next_token() {
    const std::uint32_t line = line_;
    const std::uint32_t col = col_;
    const char c = src_[pos_];

    switch (c) {
      case '(': advance(); return make(Tok::LParen, "(", line, col);
      case ')': advance(); return make(Tok::RParen, ")", line, col);
      case '{': advance(); return make(Tok::LBrace, "{", line, col);
      case '}': advance(); return make(Tok::RBrace, "}", line, col);
      case '[': advance(); return make(Tok::LBracket, "[", line, col);
      case ']': advance(); return make(Tok::RBracket, "]", line, col);
      case '<': advance(); return make(Tok::Less, "<", line, col);
      case '>': advance(); return make(Tok::Greater, ">", line, col);
      case ',': advance(); return make(Tok::Comma, ",", line, col);
      case '=': advance(); return make(Tok::Equals, "=", line, col);
      case '*': advance(); return make(Tok::Star, "*", line, col);
      default: break;
    }

    if (c == '@') return make(Tok::GlobalId, read_sigil_name(), line, col);
    if (c == '%') return make(Tok::LocalId, read_sigil_name(), line, col);
    if (c == '#') return make(Tok::AttrId, read_sigil_name(), line, col);
    if (c == '!') {
      advance();
      if (pos_ < src_.size() && src_[pos_] == '"') {
        return make(Tok::MetaId, read_quoted(), line, col);
      }
      std::string s;
      while (pos_ < src_.size() && ident_char(src_[pos_])) {
        s.push_back(src_[pos_]);
        advance();
      }
      return make(Tok::MetaId, std::move(s), line, col);
    }

    if (c == '"') {
      std::string body = read_quoted();
      if (pos_ < src_.size() && src_[pos_] == ':') {
        advance();
        return make(Tok::Label, std::move(body), line, col);
      }
      return make(Tok::Str, std::move(body), line, col);
    }

    if (c == 'c' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '"') {
      advance();  // 'c'
      return make(Tok::CStr, read_quoted(), line, col);
    }

    if (c == '.') {
      if (pos_ + 2 < src_.size() && src_[pos_ + 1] == '.' &&
          src_[pos_ + 2] == '.') {
        advance();
        advance();
        advance();
        return make(Tok::Ellipsis, "...", line, col);
      }
    }

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      return lex_number(line, col);
    }

    if (ident_start(c)) {
      std::string s;
      while (pos_ < src_.size() && ident_char(src_[pos_])) {
        s.push_back(src_[pos_]);
        advance();
      }
      if (pos_ < src_.size() && src_[pos_] == ':') {
        advance();
        return make(Tok::Label, std::move(s), line, col);
      }
      return make(Tok::Word, std::move(s), line, col);
    }

    throw SyntaxError(line, col, "a token", std::string("'") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

}  // namespace irgraph
