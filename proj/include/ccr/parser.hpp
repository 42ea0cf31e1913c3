#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ccr/error.hpp"
#include "ccr/lexer.hpp"

namespace ccr {

struct Expr {
  enum class Kind { number, string, name, call, negate, binary };

  Kind kind = Kind::number;
  double number = 0.0;
  std::string text;  // literal text, identifier, or callee
  char op = 0;       // + - * / for binary
  std::vector<Expr> args;
  SourceLoc loc;
};

struct Stmt;

struct SceneDim {
  bool is_width = true;
  Expr value;
};

/// `robot name = robot("Display", color(...));`
struct RobotDecl {
  std::string name;
  std::vector<Expr> args;
};

struct LetDecl {
  std::string name;
  Expr value;
};

struct ProcDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<Stmt> body;
};

struct Repeat {
  Expr count;
  std::vector<Stmt> body;
};

struct CallStmt {
  std::string name;
  std::vector<Expr> args;
};

struct Stmt {
  SourceLoc loc;
  std::variant<SceneDim, RobotDecl, LetDecl, ProcDef, Repeat, CallStmt> node;

  /// Instruction calls, procedure calls and repeat blocks; the rest are declarations.
  bool is_statement() const { return std::holds_alternative<CallStmt>(node) || std::holds_alternative<Repeat>(node); }
};

struct ScriptAst {
  std::vector<Stmt> items;  // source order

  std::size_t statement_count() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const Stmt& s) { return s.is_statement(); }));
  }
};

/// Built-in instruction and constructor names; procedures may not reuse them.
inline const std::set<std::string>& builtin_names() {
  static const std::set<std::string> names{
      "initialPose", "moveTo",       "moveToBacking", "move",           "moveBacking",       "circleRight",
      "circleLeft",  "circleRightBacking", "circleLeftBacking", "wait", "synchronize",       "maxSpeed",
      "acceleration", "deceleration", "grid",         "referencePoint", "forbiddenArea",     "pose",
      "color",       "robot"};
  return names;
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

  ScriptAst parse_script() {
    ScriptAst ast;
    bool has_width = false;
    bool has_depth = false;
    std::set<std::string> procs;
    while (!at_end()) {
      Stmt s = parse_stmt(true);
      if (auto* dim = std::get_if<SceneDim>(&s.node)) {
        bool& seen = dim->is_width ? has_width : has_depth;
        if (seen) throw SyntaxError(std::string(dim->is_width ? "sceneWidth" : "sceneDepth") + " is already declared", s.loc);
        seen = true;
      } else if (!(has_width && has_depth)) {
        throw SyntaxError("sceneWidth and sceneDepth must be declared before any other statement", s.loc);
      }
      if (auto* proc = std::get_if<ProcDef>(&s.node)) {
        if (!procs.insert(proc->name).second) throw SyntaxError("procedure '" + proc->name + "' is already defined", s.loc);
      }
      ast.items.push_back(std::move(s));
    }
    return ast;
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& peek(std::size_t ahead = 0) const {
    static const Token none{};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : none;
  }

  SourceLoc here() const {
    if (!at_end()) return toks_[pos_].loc;
    if (toks_.empty()) return {1, 1};
    const Token& last = toks_.back();
    return {last.loc.line, last.loc.column + static_cast<int>(last.length)};
  }

  std::string describe_current() const {
    if (at_end()) return "end of input";
    const Token& t = peek();
    if (t.kind == TokenKind::string) return "string \"" + t.lexeme + "\"";
    return "'" + t.lexeme + "'";
  }

  [[noreturn]] void fail_expected(const std::string& what) const {
    throw SyntaxError("expected " + what + " but found " + describe_current(), here());
  }

  bool check_punct(char c) const { return !at_end() && peek().is_punct(c); }

  bool accept_punct(char c) {
    if (!check_punct(c)) return false;
    ++pos_;
    return true;
  }

  const Token& expect_punct(char c) {
    if (!check_punct(c)) fail_expected(std::string("'") + c + "'");
    return toks_[pos_++];
  }

  const Token& expect_identifier(const char* what) {
    if (at_end() || peek().kind != TokenKind::identifier) fail_expected(what);
    return toks_[pos_++];
  }

  Stmt parse_stmt(bool top_level) {
    const Token& t = peek();
    Stmt s;
    s.loc = t.loc;
    if (t.is(TokenKind::keyword, "robot")) {
      if (!top_level) throw SyntaxError("robots can only be declared at the top level", t.loc);
      ++pos_;
      RobotDecl decl;
      decl.name = expect_identifier("robot variable name").lexeme;
      expect_punct('=');
      if (!peek().is(TokenKind::keyword, "robot")) fail_expected("robot(...)");
      ++pos_;
      decl.args = parse_args();
      expect_punct(';');
      s.node = std::move(decl);
    } else if (t.is(TokenKind::keyword, "let")) {
      ++pos_;
      LetDecl decl;
      decl.name = expect_identifier("variable name").lexeme;
      expect_punct('=');
      decl.value = parse_expr();
      expect_punct(';');
      s.node = std::move(decl);
    } else if (t.is(TokenKind::keyword, "proc")) {
      if (!top_level) throw SyntaxError("procedures can only be defined at the top level", t.loc);
      ++pos_;
      ProcDef def;
      const Token& name = expect_identifier("procedure name");
      def.name = name.lexeme;
      if (builtin_names().count(def.name)) throw SyntaxError("'" + def.name + "' is a built-in and cannot be redefined", name.loc);
      expect_punct('(');
      if (!check_punct(')')) {
        do {
          const Token& p = expect_identifier("parameter name");
          if (std::find(def.params.begin(), def.params.end(), p.lexeme) != def.params.end()) {
            throw SyntaxError("parameter '" + p.lexeme + "' is listed twice", p.loc);
          }
          def.params.push_back(p.lexeme);
        } while (accept_punct(','));
      }
      expect_punct(')');
      def.body = parse_block();
      s.node = std::move(def);
    } else if (t.is(TokenKind::keyword, "repeat")) {
      ++pos_;
      Repeat rep;
      rep.count = parse_expr();
      rep.body = parse_block();
      s.node = std::move(rep);
    } else if (t.kind == TokenKind::identifier && peek(1).is_punct('=')) {
      if (t.lexeme != "sceneWidth" && t.lexeme != "sceneDepth") {
        throw SyntaxError("cannot assign to '" + t.lexeme + "'; declare variables with 'let'", t.loc);
      }
      if (!top_level) throw SyntaxError("scene dimensions can only be declared at the top level", t.loc);
      pos_ += 2;
      SceneDim dim;
      dim.is_width = t.lexeme == "sceneWidth";
      dim.value = parse_expr();
      expect_punct(';');
      s.node = std::move(dim);
    } else if (t.kind == TokenKind::identifier) {
      ++pos_;
      CallStmt call;
      call.name = t.lexeme;
      if (!check_punct('(')) fail_expected("'(' after '" + t.lexeme + "'");
      call.args = parse_args();
      expect_punct(';');
      s.node = std::move(call);
    } else {
      fail_expected("a statement");
    }
    return s;
  }

  std::vector<Stmt> parse_block() {
    expect_punct('{');
    std::vector<Stmt> body;
    while (!check_punct('}')) {
      if (at_end()) fail_expected("'}'");
      body.push_back(parse_stmt(false));
    }
    ++pos_;
    return body;
  }

  std::vector<Expr> parse_args() {
    expect_punct('(');
    std::vector<Expr> args;
    if (!check_punct(')')) {
      do {
        args.push_back(parse_expr());
      } while (accept_punct(','));
    }
    expect_punct(')');
    return args;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (check_punct('+') || check_punct('-')) {
      const Token& op = toks_[pos_++];
      lhs = binary(op, std::move(lhs), parse_term());
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (check_punct('*') || check_punct('/')) {
      const Token& op = toks_[pos_++];
      lhs = binary(op, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (check_punct('-')) {
      Expr e;
      e.kind = Expr::Kind::negate;
      e.loc = toks_[pos_++].loc;
      e.args.push_back(parse_unary());
      return e;
    }
    return parse_primary();
  }

  Expr parse_primary() {
    if (at_end()) fail_expected("an expression");
    const Token& t = toks_[pos_];
    Expr e;
    e.loc = t.loc;
    switch (t.kind) {
      case TokenKind::number:
        ++pos_;
        e.kind = Expr::Kind::number;
        e.number = parse_number(t);
        e.text = t.lexeme;
        return e;
      case TokenKind::string:
        ++pos_;
        e.kind = Expr::Kind::string;
        e.text = t.lexeme;
        return e;
      case TokenKind::identifier:
        ++pos_;
        e.text = t.lexeme;
        if (check_punct('(')) {
          e.kind = Expr::Kind::call;
          e.args = parse_args();
        } else {
          e.kind = Expr::Kind::name;
        }
        return e;
      case TokenKind::punct:
        if (t.is_punct('(')) {
          ++pos_;
          Expr inner = parse_expr();
          expect_punct(')');
          return inner;
        }
        break;
      case TokenKind::keyword:
        break;
    }
    fail_expected("an expression");
  }

  static Expr binary(const Token& op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Expr::Kind::binary;
    e.op = op.lexeme[0];
    e.loc = op.loc;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Builds the syntax tree; scene dimensions must come before anything else.
inline ScriptAst parse(std::span<const Token> tokens) { return detail::Parser(tokens).parse_script(); }

inline ScriptAst parse_source(std::string_view source) {
  auto tokens = tokenize(source);
  return parse(tokens);
}

}  // namespace ccr
