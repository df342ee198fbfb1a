#pragma once

#include "tsc/error.hpp"

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

namespace tsc::detail {

enum class TokenKind { Ident, Number, String, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

// Tokenizer for the .tsc language and the formula text format. `#` starts a
// comment running to end of line.
class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }
  Token peek2() const {
    Lexer copy = *this;
    copy.next();
    return copy.peek();
  }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  bool at_end() const { return current_.kind == TokenKind::End; }

  bool is(std::string_view text) const {
    return (current_.kind == TokenKind::Punct || current_.kind == TokenKind::Ident) && current_.text == text;
  }

  bool accept(std::string_view text) {
    if (!is(text)) return false;
    next();
    return true;
  }

  Token expect(std::string_view text) {
    if (!is(text)) fail("expected '" + std::string(text) + "', found " + describe(current_));
    return next();
  }

  Token expect_ident(std::string_view what) {
    if (current_.kind != TokenKind::Ident) fail("expected " + std::string(what) + ", found " + describe(current_));
    return next();
  }

  // Raw text up to (excluding) `close`, which is consumed. Used for units.
  std::string raw_until(char close) {
    // current_ is the token right after the opening bracket; restart from it.
    pos_ = current_offset_;
    line_ = current_.line;
    col_ = current_.column;
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != close) {
      if (src_[pos_] == '\n') fail("unterminated unit");
      out += src_[pos_];
      bump();
    }
    if (pos_ >= src_.size()) fail("unterminated unit");
    bump();
    advance();
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.front()))) out.erase(out.begin());
    return out;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(current_.line, current_.column, message); }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::End: return "end of input";
      case TokenKind::String: return "string \"" + t.text + "\"";
      case TokenKind::Number: return "number " + t.text;
      default: return "'" + t.text + "'";
    }
  }

 private:
  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_space();
    current_offset_ = pos_;
    current_ = Token{};
    current_.line = line_;
    current_.column = col_;
    if (pos_ >= src_.size()) return;
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      current_.kind = TokenKind::Ident;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        current_.text += src_[pos_];
        bump();
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      current_.kind = TokenKind::Number;
      lex_number();
    } else if (c == '"') {
      current_.kind = TokenKind::String;
      bump();
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\n') throw ParseError(current_.line, current_.column, "unterminated string");
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) bump();
        current_.text += src_[pos_];
        bump();
      }
      if (pos_ >= src_.size()) throw ParseError(current_.line, current_.column, "unterminated string");
      bump();
    } else {
      current_.kind = TokenKind::Punct;
      static constexpr std::string_view two[] = {"<=", ">=", "==", "&&"};
      for (auto op : two) {
        if (src_.substr(pos_, 2) == op) {
          current_.text = std::string(op);
          bump();
          bump();
          return;
        }
      }
      static constexpr std::string_view single = "{}()[],.:;+-<>=/^*";
      if (single.find(c) == std::string_view::npos)
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
      current_.text = std::string(1, c);
      bump();
    }
  }

  void lex_number() {
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        current_.text += src_[pos_];
        bump();
      }
    };
    digits();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      current_.text += '.';
      bump();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) {
          current_.text += src_[pos_];
          bump();
        }
        digits();
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::size_t current_offset_ = 0;
  Token current_;
};

}  // namespace tsc::detail
