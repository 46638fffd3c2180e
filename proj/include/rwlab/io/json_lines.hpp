#pragma once

// Maps JSON pointers to the 1-based source line where the value starts.
// nlohmann::json drops positions after parsing, so config errors use this
// side table to name a line.

#include <cctype>
#include <map>
#include <string>
#include <string_view>

namespace rwlab {

class JsonLineIndex {
 public:
  // `text` must already be valid JSON.
  explicit JsonLineIndex(std::string_view text) : text_(text) {
    skip_ws();
    if (pos_ < text_.size()) value("");
  }

  // Line of the value at `pointer` (e.g. "/measure/2/weight"); falls back to
  // the nearest enclosing value that was indexed.
  int line(std::string pointer) const {
    for (;;) {
      const auto it = lines_.find(pointer);
      if (it != lines_.end()) return it->second;
      if (pointer.empty()) return 0;
      pointer.erase(pointer.rfind('/'));
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        ++pos_;
        out.push_back(text_[pos_] == '/' ? '/' : text_[pos_]);
      } else {
        out.push_back(text_[pos_]);
      }
      ++pos_;
    }
    ++pos_;  // closing quote
    return out;
  }

  // RFC 6901 escaping of a key.
  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out.push_back(c);
    }
    return out;
  }

  void value(const std::string& pointer) {
    lines_.emplace(pointer, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      if (text_[pos_] == '}') {
        ++pos_;
        return;
      }
      for (;;) {
        skip_ws();
        const std::string key = string();
        skip_ws();
        ++pos_;  // ':'
        skip_ws();
        value(pointer + "/" + escape(key));
        skip_ws();
        if (text_[pos_++] == '}') return;
      }
    }
    if (c == '[') {
      ++pos_;
      skip_ws();
      if (text_[pos_] == ']') {
        ++pos_;
        return;
      }
      for (std::size_t k = 0;; ++k) {
        skip_ws();
        value(pointer + "/" + std::to_string(k));
        skip_ws();
        if (text_[pos_++] == ']') return;
      }
    }
    if (c == '"') {
      string();
      return;
    }
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

// 1-based line of byte offset `offset` in `text`.
inline int line_of_offset(std::string_view text, std::size_t offset) {
  int line = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

}  // namespace rwlab
