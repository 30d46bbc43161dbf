#pragma once

// Recursive-descent parser for ASL. Total on arbitrary input: every failure
// is reported as a SpecError carrying a Diagnostic whose position lies
// inside the input.

#include <array>
#include <charconv>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mechcheck/asl.hpp"

namespace mechcheck::asl {

namespace detail {

enum class Tok { id, integer, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceLoc loc;
};

inline constexpr std::array<std::string_view, 20> kKeywords = {
    "class",  "subclassOf", "individual", "objprop",  "assert", "dataprop", "assertval",
    "process", "inputs",    "outputs",    "pre",      "result", "body",     "perform",
    "sequence", "while",    "some",       "all",      "and",    "or"};

inline bool is_keyword(std::string_view s) {
  for (auto k : kKeywords)
    if (k == s) return true;
  return false;
}

inline bool is_id_start(unsigned char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
inline bool is_id_char(unsigned char c) { return is_id_start(c) || (c >= '0' && c <= '9'); }
inline bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) break;
      SourceLoc at{line_, col_};
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (is_id_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_id_char(static_cast<unsigned char>(src_[pos_]))) advance();
        out.push_back({Tok::id, std::string(src_.substr(start, pos_ - start)), at});
      } else if (is_digit(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(static_cast<unsigned char>(src_[pos_]))) advance();
        out.push_back({Tok::integer, std::string(src_.substr(start, pos_ - start)), at});
      } else {
        std::string p = punct();
        if (p.empty()) {
          std::string shown = c >= 0x20 && c < 0x7f ? std::string(1, static_cast<char>(c))
                                                    : "byte 0x" + hex(c);
          throw SpecError({ErrorKind::SyntaxError, at.line, at.col, "unexpected character '" + shown + "'", {}});
        }
        out.push_back({Tok::punct, p, at});
      }
    }
    out.push_back({Tok::end, "end of input", end_loc()});
    return out;
  }

 private:
  static std::string hex(unsigned char c) {
    const char* digits = "0123456789abcdef";
    return {digits[c >> 4], digits[c & 15]};
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

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string punct() {
    static constexpr std::array<std::string_view, 5> two = {":=", "<=", ">=", "==", "!="};
    if (pos_ + 1 < src_.size()) {
      std::string_view s = src_.substr(pos_, 2);
      for (auto t : two)
        if (s == t) {
          advance();
          advance();
          return std::string(s);
        }
    }
    static constexpr std::string_view one = ";:(){},=+-<>";
    if (one.find(src_[pos_]) != std::string_view::npos) {
      std::string s(1, src_[pos_]);
      advance();
      return s;
    }
    return {};
  }

  // The end token sits on the last byte of the input so that diagnostics
  // at end of input still point inside it.
  SourceLoc end_loc() const {
    if (src_.empty()) return {1, 1};
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

inline constexpr int kMaxNesting = 200;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SpecAst spec() {
    SpecAst ast;
    while (peek().kind != Tok::end) ast.decls.push_back(decl());
    return ast;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_punct(std::string_view p) const { return peek().kind == Tok::punct && peek().text == p; }
  bool at_keyword(std::string_view k) const { return peek().kind == Tok::id && peek().text == k; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw SpecError({ErrorKind::SyntaxError, t.loc.line, t.loc.col, "unexpected " + got, std::move(expected)});
  }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) fail({"'" + std::string(p) + "'"});
    take();
  }

  void expect_keyword(std::string_view k) {
    if (!at_keyword(k)) fail({"'" + std::string(k) + "'"});
    take();
  }

  std::string ident() {
    if (peek().kind != Tok::id || is_keyword(peek().text)) fail({"identifier"});
    return take().text;
  }

  std::int64_t integer() {
    bool negative = false;
    if (at_punct("-")) {
      take();
      negative = true;
    }
    if (peek().kind != Tok::integer) fail({"integer"});
    const Token& t = peek();
    std::uint64_t mag = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
    const std::uint64_t limit = negative ? std::uint64_t{1} << 63 : (std::uint64_t{1} << 63) - 1;
    if (ec != std::errc() || mag > limit)
      throw SpecError({ErrorKind::SyntaxError, t.loc.line, t.loc.col, "integer out of range", {}});
    take();
    if (negative) return mag == (std::uint64_t{1} << 63) ? std::numeric_limits<std::int64_t>::min()
                                                          : -static_cast<std::int64_t>(mag);
    return static_cast<std::int64_t>(mag);
  }

  void enter() {
    if (++depth_ > kMaxNesting)
      throw SpecError({ErrorKind::SyntaxError, peek().loc.line, peek().loc.col, "nesting too deep", {}});
  }
  void leave() { --depth_; }

  Decl decl() {
    SourceLoc loc = peek().loc;
    if (at_keyword("class")) {
      take();
      ClassDecl d;
      d.loc = loc;
      d.name = ident();
      if (at_keyword("subclassOf")) {
        take();
        d.super = ident();
      } else if (at_punct("=")) {
        take();
        d.definition = class_expr();
      }
      if (!at_punct(";")) fail(d.super || d.definition ? std::vector<std::string>{"';'"}
                                                       : std::vector<std::string>{"'subclassOf'", "'='", "';'"});
      take();
      return d;
    }
    if (at_keyword("individual")) {
      take();
      IndividualDecl d;
      d.loc = loc;
      d.name = ident();
      expect_punct(":");
      d.cls = ident();
      expect_punct(";");
      return d;
    }
    if (at_keyword("objprop")) {
      take();
      ObjPropDecl d{ident(), loc};
      expect_punct(";");
      return d;
    }
    if (at_keyword("dataprop")) {
      take();
      DataPropDecl d{ident(), loc};
      expect_punct(";");
      return d;
    }
    if (at_keyword("assert")) {
      take();
      AssertDecl d;
      d.loc = loc;
      d.prop = ident();
      expect_punct("(");
      d.subject = ident();
      expect_punct(",");
      d.object = ident();
      expect_punct(")");
      expect_punct(";");
      return d;
    }
    if (at_keyword("assertval")) {
      take();
      AssertValDecl d;
      d.loc = loc;
      d.prop = ident();
      expect_punct("(");
      d.subject = ident();
      expect_punct(",");
      d.value = integer();
      expect_punct(")");
      expect_punct(";");
      return d;
    }
    if (at_keyword("process")) return process();
    fail({"'class'", "'individual'", "'objprop'", "'assert'", "'dataprop'", "'assertval'", "'process'"});
  }

  ClassExpr class_expr() {
    enter();
    ClassExpr e;
    if (at_keyword("some") || at_keyword("all")) {
      bool some = peek().text == "some";
      take();
      expect_punct("(");
      std::string prop = ident();
      expect_punct(",");
      ClassExpr inner = class_expr();
      expect_punct(")");
      e = some ? ClassExpr::some(std::move(prop), std::move(inner)) : ClassExpr::all(std::move(prop), std::move(inner));
    } else if (at_keyword("and") || at_keyword("or")) {
      bool conj = peek().text == "and";
      take();
      expect_punct("(");
      ClassExpr a = class_expr();
      expect_punct(",");
      ClassExpr b = class_expr();
      expect_punct(")");
      e = conj ? ClassExpr::conj(std::move(a), std::move(b)) : ClassExpr::disj(std::move(a), std::move(b));
    } else if (peek().kind == Tok::id && !is_keyword(peek().text)) {
      e = ClassExpr::named(take().text);
    } else {
      fail({"identifier", "'some'", "'all'", "'and'", "'or'"});
    }
    leave();
    return e;
  }

  std::vector<std::string> idlist_until_rparen() {
    std::vector<std::string> names;
    if (at_punct(")")) return names;
    names.push_back(ident());
    while (at_punct(",")) {
      take();
      names.push_back(ident());
    }
    return names;
  }

  Decl process() {
    ProcessDecl d;
    d.loc = peek().loc;
    take();
    d.name = ident();
    expect_punct("{");
    while (!at_punct("}")) {
      Section s;
      s.loc = peek().loc;
      if (at_keyword("inputs") || at_keyword("outputs")) {
        s.kind = peek().text == "inputs" ? Section::Kind::inputs : Section::Kind::outputs;
        take();
        expect_punct("(");
        s.names = idlist_until_rparen();
        expect_punct(")");
      } else if (at_keyword("pre") || at_keyword("result")) {
        s.kind = peek().text == "pre" ? Section::Kind::pre : Section::Kind::result;
        take();
        expect_punct("(");
        if (!at_punct(")")) s.cond = cond();
        expect_punct(")");
      } else if (at_keyword("body")) {
        s.kind = Section::Kind::body;
        take();
        s.body = block();
      } else {
        fail({"'inputs'", "'outputs'", "'pre'", "'result'", "'body'", "'}'"});
      }
      d.sections.push_back(std::move(s));
    }
    take();
    return d;
  }

  std::vector<Stmt> block() {
    expect_punct("{");
    enter();
    std::vector<Stmt> body;
    while (!at_punct("}")) body.push_back(stmt());
    take();
    leave();
    return body;
  }

  Stmt stmt() {
    Stmt s;
    s.loc = peek().loc;
    if (at_keyword("perform")) {
      take();
      s.kind = Stmt::Kind::perform;
      s.name = ident();
      expect_punct("(");
      s.args = idlist_until_rparen();
      expect_punct(")");
      expect_punct(";");
    } else if (at_keyword("sequence")) {
      take();
      s.kind = Stmt::Kind::sequence;
      s.body = block();
    } else if (at_keyword("while")) {
      take();
      s.kind = Stmt::Kind::while_;
      s.cond = cond();
      s.body = block();
    } else if (peek().kind == Tok::id && !is_keyword(peek().text)) {
      s.kind = Stmt::Kind::assign;
      s.name = take().text;
      expect_punct(":=");
      s.expr = expr();
      expect_punct(";");
    } else {
      fail({"identifier", "'perform'", "'sequence'", "'while'", "'}'"});
    }
    return s;
  }

  Term term() {
    if (peek().kind == Tok::id && !is_keyword(peek().text)) return Term::variable(take().text);
    if (peek().kind == Tok::integer || at_punct("-")) return Term::literal(integer());
    fail({"identifier", "integer"});
  }

  Expr expr() {
    Expr e;
    e.terms.push_back(term());
    while (at_punct("+") || at_punct("-")) {
      e.ops.push_back(take().text[0]);
      e.terms.push_back(term());
    }
    return e;
  }

  Cond cond() {
    Cond c;
    c.lhs = expr();
    static constexpr std::array<std::pair<std::string_view, CmpOp>, 6> ops = {{{"<", CmpOp::lt},
                                                                               {"<=", CmpOp::le},
                                                                               {">", CmpOp::gt},
                                                                               {">=", CmpOp::ge},
                                                                               {"==", CmpOp::eq},
                                                                               {"!=", CmpOp::ne}}};
    bool found = false;
    if (peek().kind == Tok::punct)
      for (auto [text, op] : ops)
        if (peek().text == text) {
          c.op = op;
          found = true;
        }
    if (!found) fail({"'<'", "'<='", "'>'", "'>='", "'=='", "'!='", "'+'", "'-'"});
    take();
    c.rhs = expr();
    return c;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace detail

/// Parses ASL source text. Throws SpecError on the first syntax error.
inline SpecAst parse(std::string_view text) {
  return detail::Parser(detail::Lexer(text).run()).spec();
}

}  // namespace mechcheck::asl
