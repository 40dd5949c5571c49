#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace test {

/// Recursive-descent checker for the DOT language (digraph subset: node,
/// edge, attribute and subgraph statements). Counts node shapes on the way.
class DotChecker {
 public:
  explicit DotChecker(std::string text) : s_(std::move(text)) {}

  /// Throws std::runtime_error on a grammar violation.
  void check() {
    ws();
    if (keyword("strict")) ws();
    if (!keyword("digraph")) fail("expected digraph");
    ws();
    if (peek() != '{') id();
    ws();
    expect('{');
    stmt_list();
    expect('}');
    ws();
    if (i_ != s_.size()) fail("trailing text");
  }

  std::size_t nodes_with_shape(const std::string& shape) const {
    std::size_t n = 0;
    for (const auto& s : node_shapes_) n += s == shape;
    return n;
  }
  std::size_t node_statements() const { return node_shapes_.size(); }
  std::size_t edges() const { return edges_; }
  std::size_t subgraphs() const { return subgraphs_; }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("DOT: " + msg + " at offset " + std::to_string(i_));
  }
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char c) {
    ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
    ws();
  }
  bool keyword(const std::string& k) {
    if (s_.compare(i_, k.size(), k) != 0) return false;
    char after = i_ + k.size() < s_.size() ? s_[i_ + k.size()] : ' ';
    if (std::isalnum(static_cast<unsigned char>(after)) || after == '_') return false;
    i_ += k.size();
    return true;
  }

  std::string id() {
    ws();
    std::string out;
    char c = peek();
    if (c == '"') {
      ++i_;
      while (i_ < s_.size() && s_[i_] != '"') {
        if (s_[i_] == '\\' && i_ + 1 < s_.size()) out += s_[i_++];
        out += s_[i_++];
      }
      if (peek() != '"') fail("unterminated string");
      ++i_;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') out += s_[i_++];
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '-') out += s_[i_++];
    } else {
      fail("expected an ID");
    }
    ws();
    return out;
  }

  /// Returns the value of the shape attribute if present.
  std::string attr_list() {
    std::string shape;
    while (peek() == '[') {
      expect('[');
      while (peek() != ']') {
        std::string key = id();
        expect('=');
        std::string value = id();
        if (key == "shape") shape = value;
        if (peek() == ',' || peek() == ';') expect(peek());
      }
      expect(']');
    }
    return shape;
  }

  void stmt_list() {
    ws();
    while (peek() != '}' && peek() != '\0') {
      stmt();
      if (peek() == ';') expect(';');
    }
  }

  void stmt() {
    ws();
    if (peek() == '{' || keyword("subgraph")) {
      subgraph_body();
      return;
    }
    std::string first = id();
    if (peek() == '=') {
      expect('=');
      id();
      return;
    }
    if (first == "graph" || first == "node" || first == "edge") {
      if (peek() != '[') fail("expected attributes");
      attr_list();
      return;
    }
    if (s_.compare(i_, 2, "->") == 0) {
      while (s_.compare(i_, 2, "->") == 0) {
        i_ += 2;
        ws();
        if (peek() == '{' || keyword("subgraph")) subgraph_body();
        else id();
        ++edges_;
      }
      attr_list();
      return;
    }
    node_shapes_.push_back(attr_list());
  }

  void subgraph_body() {
    ws();
    if (peek() != '{') id();
    expect('{');
    ++subgraphs_;
    stmt_list();
    expect('}');
  }

  std::string s_;
  std::size_t i_ = 0;
  std::vector<std::string> node_shapes_;
  std::size_t edges_ = 0;
  std::size_t subgraphs_ = 0;
};

}  // namespace test
