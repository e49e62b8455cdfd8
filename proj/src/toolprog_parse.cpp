// Copyright 2026 The Toolvis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cstdio>

#include "toolvis/toolprog.hpp"

namespace toolvis {
namespace {

bool is_ident_start(char c) { return c >= 'a' && c <= 'z'; }
bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ToolProgram run() {
    ToolProgram program;
    skip_blank_and_newlines();
    if (at_end()) fail("empty program: expected a tool call", pos_, 0, "end of input");
    while (true) {
      program.calls.push_back(parse_call());
      int pipes = 0;
      int newlines = 0;
      while (!at_end() && (is_blank(peek()) || peek() == '\n' || peek() == '|')) {
        if (peek() == '|') {
          if (++pipes > 1) fail("expected a tool call between '|' separators", pos_, 1, "'|'");
        } else if (peek() == '\n') {
          ++newlines;
        }
        ++pos_;
      }
      if (at_end()) {
        if (pipes > 0) fail("expected a tool call after '|'", pos_, 0, "end of input");
        return program;
      }
      if (pipes == 0 && newlines == 0) {
        fail("expected '|' or newline between calls but found " + describe(pos_), pos_, 1,
             describe(pos_));
      }
    }
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  void skip_blank() {
    while (!at_end() && is_blank(peek())) ++pos_;
  }
  void skip_blank_and_newlines() {
    while (!at_end() && (is_blank(peek()) || peek() == '\n')) ++pos_;
  }

  SourceSpan span_at(std::size_t offset, std::size_t length) const {
    SourceSpan s{offset, length, 1, 1};
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++s.line;
        s.column = 1;
      } else {
        ++s.column;
      }
    }
    return s;
  }

  std::string describe(std::size_t offset) const {
    if (offset >= src_.size()) return "end of input";
    const auto c = static_cast<unsigned char>(src_[offset]);
    if (c == '\n') return "newline";
    if (c >= 0x20 && c < 0x7f) return std::string("'") + static_cast<char>(c) + "'";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "byte 0x%02x", c);
    return buf;
  }

  [[noreturn]] void fail(const std::string& message, std::size_t offset, std::size_t length,
                         std::string token) const {
    throw ParseError(message, span_at(offset, length), std::move(token));
  }

  std::string parse_ident() {
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(peek())) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  ToolCall parse_call() {
    const std::size_t start = pos_;
    if (at_end() || !is_ident_start(peek())) {
      fail("expected tool name but found " + describe(pos_), pos_, at_end() ? 0 : 1,
           describe(pos_));
    }
    ToolCall call;
    call.tool = canonical_tool_name(parse_ident());
    const std::string quoted = "'" + call.tool + "'";
    if (at_end() || peek() != '(') {
      fail("expected '(' after tool name " + quoted + " but found " + describe(pos_), pos_,
           at_end() ? 0 : 1, describe(pos_));
    }
    const std::size_t open = pos_++;
    auto unclosed = [&] {
      fail("unclosed '(' in call to " + quoted, open, 1, "'('");
    };
    if (at_end()) unclosed();
    if (peek() != ')') {
      while (true) {
        if (at_end()) unclosed();
        if (!is_ident_start(peek())) {
          fail("expected argument name in call to " + quoted + " but found " + describe(pos_),
               pos_, 1, describe(pos_));
        }
        const std::size_t name_pos = pos_;
        Arg arg;
        arg.name = parse_ident();
        for (const Arg& prev : call.args) {
          if (prev.name == arg.name) {
            fail("duplicate argument '" + arg.name + "' in call to " + quoted, name_pos,
                 arg.name.size(), "'" + arg.name + "'");
          }
        }
        if (at_end()) unclosed();
        if (peek() != '=') {
          fail("expected '=' after argument '" + arg.name + "' in call to " + quoted +
                   " but found " + describe(pos_),
               pos_, 1, describe(pos_));
        }
        ++pos_;
        if (at_end()) unclosed();
        arg.value = parse_value(arg.name, quoted);
        call.args.push_back(std::move(arg));
        if (at_end()) unclosed();
        if (peek() == ',') {
          ++pos_;
          skip_blank();
          continue;
        }
        if (peek() == ')') break;
        fail("expected ',' or ')' in call to " + quoted + " but found " + describe(pos_), pos_,
             1, describe(pos_));
      }
    }
    ++pos_;  // ')'
    call.span = span_at(start, pos_ - start);
    return call;
  }

  ArgValue parse_value(const std::string& arg, const std::string& quoted_tool) {
    const std::size_t start = pos_;
    if (peek() == '"') return parse_string(quoted_tool);
    if (peek() == '-') ++pos_;
    if (at_end() || !is_digit(peek())) {
      fail("expected a number or string for argument '" + arg + "' in call to " + quoted_tool +
               " but found " + describe(start),
           start, at_end() ? 0 : 1, describe(start));
    }
    while (!at_end() && is_digit(peek())) ++pos_;
    bool is_float = false;
    if (!at_end() && peek() == '.') {
      ++pos_;
      if (at_end() || !is_digit(peek())) {
        fail("expected digits after '.' in argument '" + arg + "' in call to " + quoted_tool,
             pos_, at_end() ? 0 : 1, describe(pos_));
      }
      while (!at_end() && is_digit(peek())) ++pos_;
      is_float = true;
    }
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    const std::string literal(first, last);
    if (is_float) {
      double v = 0;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last) {
        fail("number literal " + literal + " is out of range", start, pos_ - start, literal);
      }
      return v;
    }
    std::int64_t v = 0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      fail("integer literal " + literal + " is out of range", start, pos_ - start, literal);
    }
    return v;
  }

  ArgValue parse_string(const std::string& quoted_tool) {
    const std::size_t open = pos_++;
    std::string out;
    while (true) {
      if (at_end()) {
        fail("unterminated string in call to " + quoted_tool, open, 1, "'\"'");
      }
      const char c = src_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated string in call to " + quoted_tool, open, 1, "'\"'");
      const char e = src_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default:
          fail("unknown escape in string in call to " + quoted_tool, pos_ - 2, 2,
               describe(pos_ - 1));
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

const ArgValue* ToolCall::find(std::string_view name) const {
  for (const Arg& a : args) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

ToolProgram parse(std::string_view source) { return Parser(source).run(); }

std::string render_value(const ArgValue& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) {
    char buf[512];
    const auto res = std::to_chars(buf, buf + sizeof(buf), *d, std::chars_format::fixed);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos) s += ".0";
    return s;
  }
  const auto& str = std::get<std::string>(value);
  std::string out = "\"";
  for (char c : str) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string render(const ToolProgram& program) {
  std::string out;
  for (std::size_t i = 0; i < program.calls.size(); ++i) {
    if (i > 0) out += " | ";
    const ToolCall& call = program.calls[i];
    out += call.tool;
    out += '(';
    for (std::size_t j = 0; j < call.args.size(); ++j) {
      if (j > 0) out += ", ";
      out += call.args[j].name;
      out += '=';
      out += render_value(call.args[j].value);
    }
    out += ')';
  }
  return out;
}

}  // namespace toolvis
