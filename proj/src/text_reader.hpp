#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <iterator>
#include <string>
#include <string_view>

#include "hodge3d/common.hpp"

namespace hodge3d::detail {

// Whitespace-separated tokens of a text file, with line tracking for errors.
class TextReader {
 public:
  TextReader(std::istream& in, std::string stage)
      : text_(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()),
        stage_(std::move(stage)) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(stage_, "parse error at line " + std::to_string(line_) + ": " + what);
  }

  std::string_view token() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of file");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return std::string_view(text_).substr(start, pos_ - start);
  }

  // Rest of the current line, without the newline; moves to the next line.
  std::string_view rest_of_line() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    std::string_view s = std::string_view(text_).substr(start, pos_ - start);
    if (pos_ < text_.size()) {
      ++pos_;
      ++line_;
    }
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  }

  std::int64_t integer() {
    const std::string_view t = token();
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail("expected an integer, got '" + std::string(t) + "'");
    return v;
  }

  double real() {
    const std::string_view t = token();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail("expected a number, got '" + std::string(t) + "'");
    return v;
  }

  void expect(std::string_view word) {
    const std::string_view t = token();
    if (t != word) fail("expected '" + std::string(word) + "', got '" + std::string(t) + "'");
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string text_;
  std::string stage_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace hodge3d::detail
