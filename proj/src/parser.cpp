#include "sdf/parser.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

namespace sdf {

namespace {

enum class Tok { Ident, Int, Kw, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const std::set<std::string, std::less<>> kKeywords = {"loc",  "link", "to",   "node", "with", "and",  "or",
                                                      "at",   "fby",  "if",   "then", "else", "true", "false",
                                                      "_abs_"};

struct SyntaxError {
  Diagnostic diag;
};

SyntaxError syntax_error(std::string code, const SourceSpan& span, std::string msg) {
  return {Diagnostic{Severity::Error, span, std::move(msg), std::move(code)}};
}

std::vector<Token> lex(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourceSpan span{line, col, 1};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      span.length = static_cast<int>(word.size());
      out.push_back({kKeywords.count(word) ? Tok::Kw : Tok::Ident, word, span});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string digits(src.substr(i, j - i));
      span.length = static_cast<int>(digits.size());
      out.push_back({Tok::Int, digits, span});
      advance(j - i);
      continue;
    }
    if (std::string_view(";,()[]=+-*<").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), span});
      advance(1);
      continue;
    }
    diags.push_back({Severity::Error, span, std::string("unexpected character '") + c + "'", "SYN001"});
    advance(1);
  }
  out.push_back({Tok::End, "", SourceSpan{line, col, 0}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParseResult run() {
    Program prog;
    std::set<std::string> node_names;
    // Architecture.
    while (at_kw("loc") || at_kw("link")) {
      try {
        prog.arch.push_back(parse_arch());
      } catch (const SyntaxError& e) {
        report(e);
        resync();
      }
    }
    while (at_kw("node")) {
      try {
        auto span = peek().span;
        NodeDef n = parse_node();
        if (!node_names.insert(n.name).second)
          diags_.push_back({Severity::Error, span, "duplicate node name '" + n.name + "'", "SYN003"});
        prog.nodes.push_back(std::move(n));
      } catch (const SyntaxError& e) {
        report(e);
        resync();
      }
      accept_punct(";");
    }
    if (peek().kind != Tok::End) {
      try {
        node_params_.clear();
        prog.main = parse_decl(true);
        accept_punct(";");
        if (peek().kind != Tok::End) throw unexpected("end of program");
      } catch (const SyntaxError& e) {
        report(e);
      }
    }
    ParseResult r;
    r.diagnostics = std::move(diags_);
    if (r.diagnostics.empty()) r.program = std::move(prog);
    return r;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  std::set<std::string> node_params_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_kw(std::string_view kw, std::size_t k = 0) const { return peek(k).kind == Tok::Kw && peek(k).text == kw; }
  bool at_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool accept_punct(std::string_view p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    next();
    return true;
  }

  SyntaxError unexpected(const std::string& expected) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    return syntax_error("SYN001", t.span, "expected " + expected + ", found " + found);
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) throw unexpected("'" + std::string(p) + "'");
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) throw unexpected("'" + std::string(kw) + "'");
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) throw unexpected(what);
    return next().text;
  }

  void report(const SyntaxError& e) { diags_.push_back(e.diag); }

  // Statement-level resynchronization: skip past the next ';' or stop
  // before a 'node' keyword.
  void resync() {
    while (peek().kind != Tok::End) {
      if (at_kw("node")) return;
      if (accept_punct(";")) return;
      next();
    }
  }

  ArchDecl parse_arch() {
    auto span = peek().span;
    if (accept_kw("loc")) {
      auto name = expect_ident("location name");
      expect_punct(";");
      return {ArchDecl::Loc{name}, span};
    }
    expect_kw("link");
    auto from = expect_ident("location name");
    expect_kw("to");
    auto to = expect_ident("location name");
    expect_punct(";");
    return {ArchDecl::Link{from, to}, span};
  }

  NodeDef parse_node() {
    NodeDef n;
    n.span = peek().span;
    expect_kw("node");
    n.name = expect_ident("node name");
    node_params_.clear();
    if (accept_punct("[")) {
      do {
        auto span = peek().span;
        auto p = expect_ident("location parameter");
        if (!node_params_.insert(p).second)
          throw syntax_error("SYN002", span, "duplicate location parameter '" + p + "'");
        n.loc_params.push_back(Location::var(p));
      } while (accept_punct(","));
      expect_punct("]");
    }
    auto pspan = peek().span;
    expect_punct("(");
    std::vector<Pattern> items;
    items.push_back(parse_pattern());
    while (accept_punct(",")) items.push_back(parse_pattern());
    expect_punct(")");
    n.input = items.size() == 1 ? items.front() : Pattern::tuple(std::move(items));
    check_distinct(n.input, pspan);
    expect_punct("=");
    n.body_expr = parse_expr(false);
    n.body_decls = accept_kw("with") ? parse_decl(true) : make_empty();
    node_params_.clear();
    return n;
  }

  Pattern parse_pattern() {
    if (peek().kind == Tok::Ident) return Pattern::single(next().text);
    if (accept_punct("(")) {
      std::vector<Pattern> items;
      items.push_back(parse_pattern());
      while (accept_punct(",")) items.push_back(parse_pattern());
      expect_punct(")");
      if (items.size() == 1) return items.front();
      return Pattern::tuple(std::move(items));
    }
    throw unexpected("pattern");
  }

  static void check_distinct(const Pattern& p, const SourceSpan& span) {
    std::set<Ident> seen;
    for (const auto& v : pattern_vars(p))
      if (!seen.insert(v).second) throw syntax_error("SYN002", span, "variable '" + v + "' bound twice in pattern");
  }

  Location location(const std::string& name) const {
    return node_params_.count(name) ? Location::var(name) : Location::constant(name);
  }

  // Does a declaration start at token offset k? Used to tell the `and`
  // joining equations from the boolean operator.
  bool decl_starts_at(std::size_t k) const {
    if (at_kw("if", k)) return true;
    if (peek(k).kind == Tok::Ident) return at_punct("=", k + 1);
    if (at_punct("(", k)) {
      int depth = 0;
      for (std::size_t j = k; pos_ + j < toks_.size(); ++j) {
        const auto& t = peek(j);
        if (t.kind == Tok::End) return false;
        if (t.kind == Tok::Punct && t.text == "(") ++depth;
        if (t.kind == Tok::Punct && t.text == ")" && --depth == 0) return at_punct("=", j + 1);
      }
    }
    return false;
  }

  DeclPtr parse_decl(bool top) {
    auto span = peek().span;
    std::vector<DeclPtr> items;
    items.push_back(parse_decl_atom());
    while (at_kw("and")) {
      next();
      items.push_back(parse_decl_atom());
    }
    (void)top;
    DeclPtr acc = items.back();
    for (auto it = items.rbegin() + 1; it != items.rend(); ++it) acc = make_and(*it, acc, span);
    return acc;
  }

  DeclPtr parse_branch() { return parse_decl_atom(); }

  DeclPtr parse_decl_atom() {
    auto span = peek().span;
    if (accept_kw("if")) {
      auto cond = parse_expr(false);
      expect_kw("then");
      auto t = parse_branch();
      expect_kw("else");
      auto e = parse_branch();
      return make_if(cond, t, e, span);
    }
    if (at_punct("(")) {
      if (at_punct(")", 1)) {
        next();
        next();
        return make_empty();
      }
      if (!decl_starts_at(0)) {
        next();
        auto d = parse_decl(false);
        expect_punct(")");
        return d;
      }
    }
    auto pspan = peek().span;
    Pattern lhs = parse_pattern();
    check_distinct(lhs, pspan);
    expect_punct("=");
    if (peek().kind == Tok::Ident && at_punct("(", 1)) {
      auto callee = next().text;
      next();
      std::vector<ExprPtr> args;
      args.push_back(parse_expr(false));
      while (accept_punct(",")) args.push_back(parse_expr(false));
      expect_punct(")");
      std::optional<Location> at;
      if (accept_kw("at")) at = location(expect_ident("location"));
      if (!at_kw("and") && !at_kw("else") && !at_kw("then") && !at_punct(";") && !at_punct(")") &&
          peek().kind != Tok::End && !at_kw("node"))
        throw syntax_error("SYN004", peek().span, "a node application must be the whole right-hand side");
      return make_app(std::move(lhs), callee, sdf::make_tuple(args), at, span);
    }
    return make_eq(std::move(lhs), parse_expr(true), span);
  }

  // `decl_ctx` is true when a following `and` may start a new declaration.
  ExprPtr parse_expr(bool decl_ctx) {
    auto span = peek().span;
    auto e = parse_fby(decl_ctx);
    while (accept_kw("at")) e = make_at(e, location(expect_ident("location")), span);
    return e;
  }

  ExprPtr parse_fby(bool decl_ctx) {
    auto span = peek().span;
    auto lhs = parse_or(decl_ctx);
    if (accept_kw("fby")) return make_fby(lhs, parse_fby(decl_ctx), span);
    return lhs;
  }

  ExprPtr parse_or(bool decl_ctx) {
    auto span = peek().span;
    auto lhs = parse_and(decl_ctx);
    while (accept_kw("or")) lhs = make_binop(BinOpKind::Or, lhs, parse_and(decl_ctx), span);
    return lhs;
  }

  ExprPtr parse_and(bool decl_ctx) {
    auto span = peek().span;
    auto lhs = parse_cmp();
    while (at_kw("and") && !(decl_ctx && decl_starts_at(1))) {
      next();
      lhs = make_binop(BinOpKind::And, lhs, parse_cmp(), span);
    }
    return lhs;
  }

  ExprPtr parse_cmp() {
    auto span = peek().span;
    auto lhs = parse_add();
    while (at_punct("=") || at_punct("<")) {
      auto op = next().text == "=" ? BinOpKind::Eq : BinOpKind::Lt;
      lhs = make_binop(op, lhs, parse_add(), span);
    }
    return lhs;
  }

  ExprPtr parse_add() {
    auto span = peek().span;
    auto lhs = parse_mul();
    while (at_punct("+") || at_punct("-")) {
      auto op = next().text == "+" ? BinOpKind::Add : BinOpKind::Sub;
      lhs = make_binop(op, lhs, parse_mul(), span);
    }
    return lhs;
  }

  ExprPtr parse_mul() {
    auto span = peek().span;
    auto lhs = parse_unary();
    while (accept_punct("*")) lhs = make_binop(BinOpKind::Mul, lhs, parse_unary(), span);
    return lhs;
  }

  ExprPtr parse_unary() {
    if (at_punct("-") && peek(1).kind == Tok::Int) {
      auto span = next().span;
      return make_int(-to_int(next()), span);
    }
    return parse_primary();
  }

  std::int64_t to_int(const Token& t) const {
    try {
      return std::stoll(t.text);
    } catch (const std::exception&) {
      throw syntax_error("SYN001", t.span, "integer literal out of range");
    }
  }

  ExprPtr parse_primary() {
    const auto& t = peek();
    auto span = t.span;
    if (t.kind == Tok::Int) return make_int(to_int(next()), span);
    if (accept_kw("true")) return make_bool(true, span);
    if (accept_kw("false")) return make_bool(false, span);
    if (accept_kw("_abs_")) return make_abs(span);
    if (t.kind == Tok::Ident) {
      auto name = next().text;
      if (at_punct("("))
        throw syntax_error("SYN004", span, "application of '" + name + "' is only allowed as `p = " + name + "(e)`");
      return make_var(name, span);
    }
    if (accept_punct("(")) {
      std::vector<ExprPtr> items;
      items.push_back(parse_expr(false));
      while (accept_punct(",")) items.push_back(parse_expr(false));
      expect_punct(")");
      return sdf::make_tuple(items);
    }
    throw unexpected("expression");
  }
};

}  // namespace

ParseResult parse_program(std::string_view text) {
  std::vector<Diagnostic> lex_diags;
  auto toks = lex(text, lex_diags);
  if (!lex_diags.empty()) return {std::nullopt, std::move(lex_diags)};
  return Parser(std::move(toks)).run();
}

Program parse_or_throw(std::string_view text) {
  auto r = parse_program(text);
  if (!r.ok()) throw CompileError(std::move(r.diagnostics));
  return std::move(*r.program);
}

std::string read_source(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO001", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sdf
