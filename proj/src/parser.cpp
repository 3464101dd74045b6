#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "dmt/error.hpp"
#include "dmt/frontend.hpp"

namespace dmt {
namespace {

using namespace ast;

enum class Tok { Ident, Int, Float, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t ival = 0;
  double fval = 0.0;
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
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
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        SourceLoc at{line_, col_};
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw ParseError(at.line, at.col, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    bool is_float = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '.') {
        is_float = true;
        advance();
      } else if ((c == 'e' || c == 'E') && pos_ + 1 < src_.size()) {
        is_float = true;
        advance();
        if (src_[pos_] == '+' || src_[pos_] == '-') advance();
      } else {
        break;
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (pos_ < src_.size() && (src_[pos_] == 'f' || src_[pos_] == 'F')) {
      is_float = true;
      advance();
    }
    t.text = text;
    try {
      if (is_float) {
        t.kind = Tok::Float;
        t.fval = std::stod(text);
      } else {
        t.kind = Tok::Int;
        t.ival = std::stoll(text);
      }
    } catch (const std::exception&) {
      throw ParseError(t.loc.line, t.loc.col, "bad number '" + text + "'");
    }
  }

  void lex_punct(Token& t) {
    static const char* const kTwo[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>",
                                       "+=", "-=", "*=", "/=", "++", "--"};
    t.kind = Tok::Punct;
    for (const char* p : kTwo) {
      if (src_.substr(pos_, 2) == p) {
        t.text = p;
        advance();
        advance();
        return;
      }
    }
    static const std::string kOne = "{}()[]<>!~&|^+-*/%=;,?:.";
    char c = src_[pos_];
    if (kOne.find(c) == std::string::npos)
      throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    t.text = std::string(1, c);
    advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  KernelAST run() {
    KernelAST k;
    expect_ident("kernel");
    k.name = ident();
    expect("{");
    scopes_.emplace_back();
    while (!at("}")) {
      if (peek().kind == Tok::End) fail(peek(), "expected '}'");
      if (at_ident("const")) {
        k.consts.push_back(const_decl());
      } else if (at_ident("global")) {
        k.arrays.push_back(array_decl());
      } else {
        k.body.push_back(statement());
      }
    }
    expect("}");
    if (peek().kind != Tok::End) fail(peek(), "trailing input after kernel");
    for (const auto& [name, loc] : comm_vars_)
      if (!all_locals_.count(name)) throw ParseError(loc.line, loc.col, "undeclared variable '" + name + "'");
    return k;
  }

 private:
  enum class Sym { Local, Const, LoopVar };

  // ---- token helpers ----
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(std::string_view p, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == Tok::Punct && t.text == p;
  }
  bool at_ident(std::string_view w, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == Tok::Ident && t.text == w;
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.loc.line, t.loc.col, "syntax error: " + msg);
  }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  void expect(std::string_view p) {
    if (!at(p)) fail(peek(), "expected '" + std::string(p) + "' but found '" + peek().text + "'");
    next();
  }
  void expect_ident(std::string_view w) {
    if (!at_ident(w)) fail(peek(), "expected '" + std::string(w) + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail(peek(), "expected identifier");
    return next().text;
  }
  bool accept(std::string_view p) {
    if (!at(p)) return false;
    next();
    return true;
  }

  // ---- symbols ----
  std::optional<Sym> lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return std::nullopt;
  }
  void declare(const Token& at_tok, const std::string& name, Sym sym) {
    if (arrays_.count(name) || is_reserved(name)) fail(at_tok, "'" + name + "' redeclared");
    if (scopes_.back().count(name)) fail(at_tok, "'" + name + "' redeclared in the same scope");
    scopes_.back()[name] = sym;
    if (sym == Sym::Local) all_locals_.insert(name);
  }
  static bool is_reserved(const std::string& n) {
    static const std::set<std::string> kWords = {
        "kernel", "const", "global", "int", "float", "if", "else", "for", "tagValue",
        "fromThreadOrConst", "fromThreadOrMem", "threadIdx", "blockDim", "tid"};
    return kWords.count(n) > 0;
  }

  bool is_const_expr(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::IntLit:
      case ExprKind::FloatLit:
      case ExprKind::BlockDim:
        return true;
      case ExprKind::Var: {
        auto s = lookup(e.name);
        return s && *s != Sym::Local;
      }
      case ExprKind::Unary:
      case ExprKind::Binary:
      case ExprKind::Ternary:
      case ExprKind::Call:
        for (const auto& a : e.args)
          if (!is_const_expr(*a)) return false;
        return true;
      default:
        return false;
    }
  }

  // ---- declarations ----
  ConstDecl const_decl() {
    Token kw = next();
    ConstDecl d;
    d.loc = kw.loc;
    Token name_tok = peek();
    d.name = ident();
    expect("=");
    d.value = expression();
    if (!is_const_expr(*d.value)) fail(name_tok, "const '" + d.name + "' needs a constant initializer");
    expect(";");
    declare(name_tok, d.name, Sym::Const);
    return d;
  }

  ScalarKind type_name() {
    if (at_ident("int")) {
      next();
      return ScalarKind::Int;
    }
    if (at_ident("float")) {
      next();
      return ScalarKind::Float;
    }
    fail(peek(), "expected type");
  }

  ArrayDeclAst array_decl() {
    Token kw = next();
    ArrayDeclAst a;
    a.loc = kw.loc;
    a.type = type_name();
    Token name_tok = peek();
    a.name = ident();
    if (arrays_.count(a.name) || lookup(a.name)) fail(name_tok, "'" + a.name + "' redeclared");
    while (accept("[")) {
      auto e = expression();
      if (!is_const_expr(*e)) fail(name_tok, "array extent must be a constant expression");
      a.dims.push_back(e);
      expect("]");
    }
    if (a.dims.empty() || a.dims.size() > 3) fail(name_tok, "arrays take 1 to 3 dimensions");
    expect(";");
    arrays_[a.name] = a.dims.size();
    return a;
  }

  // ---- statements ----
  StmtPtr block_or_statement() {
    if (at("{")) return statement();
    // Single statements get their own scope too.
    scopes_.emplace_back();
    auto s = statement();
    scopes_.pop_back();
    auto b = std::make_shared<Stmt>();
    b->kind = StmtKind::Block;
    b->loc = s->loc;
    b->body.push_back(s);
    return b;
  }

  StmtPtr statement() {
    const Token start = peek();
    auto s = std::make_shared<Stmt>();
    s->loc = start.loc;
    if (accept("{")) {
      s->kind = StmtKind::Block;
      scopes_.emplace_back();
      while (!at("}")) {
        if (peek().kind == Tok::End) fail(peek(), "expected '}'");
        s->body.push_back(statement());
      }
      scopes_.pop_back();
      expect("}");
      return s;
    }
    if (accept(";")) {
      s->kind = StmtKind::Block;
      return s;
    }
    if (at_ident("const") || at_ident("global"))
      fail(start, "'" + start.text + "' declarations are only allowed at kernel scope");
    if (at_ident("int") || at_ident("float")) {
      s->kind = StmtKind::Decl;
      s->type = type_name();
      Token name_tok = peek();
      s->name = ident();
      if (accept("=")) {
        s->value = expression();
      } else {
        auto z = std::make_shared<Expr>();
        z->kind = ExprKind::IntLit;
        z->loc = name_tok.loc;
        s->value = z;
      }
      expect(";");
      declare(name_tok, s->name, Sym::Local);
      return s;
    }
    if (at_ident("if")) {
      next();
      s->kind = StmtKind::If;
      expect("(");
      s->value = expression();
      expect(")");
      s->body.push_back(block_or_statement());
      if (at_ident("else")) {
        next();
        s->has_else = true;
        s->else_body.push_back(block_or_statement());
      }
      return s;
    }
    if (at_ident("for")) return for_statement();
    if (at_ident("tagValue")) {
      next();
      s->kind = StmtKind::TagValue;
      expect("<");
      Token name_tok = peek();
      s->name = ident();
      auto sym = lookup(s->name);
      if (!sym || *sym != Sym::Local) throw ParseError(name_tok.loc.line, name_tok.loc.col, "undeclared variable '" + s->name + "'");
      expect(">");
      expect("(");
      expect(")");
      expect(";");
      return s;
    }
    if (peek().kind == Tok::Ident) {
      Token name_tok = next();
      const std::string name = name_tok.text;
      if (at("[")) {
        if (!arrays_.count(name)) throw ParseError(name_tok.loc.line, name_tok.loc.col, "undeclared array '" + name + "'");
        s->kind = StmtKind::Store;
        s->name = name;
        s->indices = indices(name_tok, name);
        auto target = make_index(name_tok, name, s->indices);
        s->value = assignment_rhs(target);
        expect(";");
        return s;
      }
      auto sym = lookup(name);
      if (!sym) throw ParseError(name_tok.loc.line, name_tok.loc.col, "undeclared variable '" + name + "'");
      if (*sym != Sym::Local) fail(name_tok, "cannot assign to constant '" + name + "'");
      s->kind = StmtKind::Assign;
      s->name = name;
      auto var = std::make_shared<Expr>();
      var->kind = ExprKind::Var;
      var->loc = name_tok.loc;
      var->name = name;
      s->value = assignment_rhs(var);
      expect(";");
      return s;
    }
    fail(start, "unexpected '" + start.text + "'");
  }

  ExprPtr assignment_rhs(const ExprPtr& target) {
    const Token op = peek();
    auto binary = [&](Opcode opc, ExprPtr rhs) {
      auto b = std::make_shared<Expr>();
      b->kind = ExprKind::Binary;
      b->loc = op.loc;
      b->op = opc;
      b->args = {target, std::move(rhs)};
      return ExprPtr(b);
    };
    auto one = [&]() {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::IntLit;
      e->ival = 1;
      e->loc = op.loc;
      return ExprPtr(e);
    };
    if (accept("=")) return expression();
    if (accept("+=")) return binary(Opcode::Add, expression());
    if (accept("-=")) return binary(Opcode::Sub, expression());
    if (accept("*=")) return binary(Opcode::Mul, expression());
    if (accept("/=")) return binary(Opcode::Div, expression());
    if (accept("++")) return binary(Opcode::Add, one());
    if (accept("--")) return binary(Opcode::Sub, one());
    fail(op, "expected assignment");
  }

  StmtPtr for_statement() {
    const Token kw = next();
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::For;
    s->loc = kw.loc;
    expect("(");
    if (at_ident("int")) next();
    Token var_tok = peek();
    s->name = ident();
    expect("=");
    s->init = expression();
    if (!is_const_expr(*s->init)) throw ParseError(var_tok.loc.line, var_tok.loc.col, "non-constant loop bound");
    expect(";");
    scopes_.emplace_back();
    declare(var_tok, s->name, Sym::LoopVar);
    Token cond_tok = peek();
    if (ident() != s->name) fail(cond_tok, "loop condition must test the loop variable");
    const Token cmp = next();
    if (cmp.text == "<") s->cmp = Opcode::Lt;
    else if (cmp.text == "<=") s->cmp = Opcode::Le;
    else if (cmp.text == ">") s->cmp = Opcode::Gt;
    else if (cmp.text == ">=") s->cmp = Opcode::Ge;
    else if (cmp.text == "!=") s->cmp = Opcode::Ne;
    else fail(cmp, "expected comparison in loop condition");
    s->limit = expression();
    if (!is_const_expr(*s->limit)) throw ParseError(cmp.loc.line, cmp.loc.col, "non-constant loop bound");
    expect(";");
    Token step_tok = peek();
    if (ident() != s->name) fail(step_tok, "loop step must update the loop variable");
    auto lit = [&](std::int64_t v) {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::IntLit;
      e->ival = v;
      e->loc = step_tok.loc;
      return ExprPtr(e);
    };
    if (accept("++")) {
      s->step = lit(1);
    } else if (accept("--")) {
      s->step = lit(-1);
    } else if (accept("+=")) {
      s->step = expression();
    } else if (accept("-=")) {
      auto neg = std::make_shared<Expr>();
      neg->kind = ExprKind::Unary;
      neg->op = Opcode::Neg;
      neg->loc = step_tok.loc;
      neg->args = {expression()};
      s->step = neg;
    } else {
      fail(step_tok, "expected ++, --, += or -= in loop step");
    }
    if (!is_const_expr(*s->step)) throw ParseError(step_tok.loc.line, step_tok.loc.col, "non-constant loop bound");
    expect(")");
    s->body.push_back(block_or_statement());
    scopes_.pop_back();
    return s;
  }

  std::vector<ExprPtr> indices(const Token& name_tok, const std::string& name) {
    std::vector<ExprPtr> idx;
    while (accept("[")) {
      idx.push_back(expression());
      expect("]");
    }
    if (idx.size() != arrays_.at(name))
      fail(name_tok, "array '" + name + "' takes " + std::to_string(arrays_.at(name)) + " indices");
    return idx;
  }

  ExprPtr make_index(const Token& t, const std::string& name, std::vector<ExprPtr> idx) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Index;
    e->loc = t.loc;
    e->name = name;
    e->args = std::move(idx);
    return e;
  }

  // ---- expressions (precedence climbing) ----
  ExprPtr expression() { return ternary(); }

  ExprPtr ternary() {
    auto cond = binary_level(0);
    if (!at("?")) return cond;
    Token q = next();
    auto a = expression();
    expect(":");
    auto b = expression();
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Ternary;
    e->loc = q.loc;
    e->args = {cond, a, b};
    return e;
  }

  struct BinOp {
    const char* text;
    Opcode op;
  };
  static const std::vector<std::vector<BinOp>>& levels() {
    static const std::vector<std::vector<BinOp>> kLevels = {
        {{"||", Opcode::LogOr}},
        {{"&&", Opcode::LogAnd}},
        {{"|", Opcode::BitOr}},
        {{"^", Opcode::BitXor}},
        {{"&", Opcode::BitAnd}},
        {{"==", Opcode::Eq}, {"!=", Opcode::Ne}},
        {{"<", Opcode::Lt}, {"<=", Opcode::Le}, {">", Opcode::Gt}, {">=", Opcode::Ge}},
        {{"<<", Opcode::Shl}, {">>", Opcode::Shr}},
        {{"+", Opcode::Add}, {"-", Opcode::Sub}},
        {{"*", Opcode::Mul}, {"/", Opcode::Div}, {"%", Opcode::Rem}},
    };
    return kLevels;
  }
  static constexpr std::size_t kAdditiveLevel = 8;

  ExprPtr binary_level(std::size_t level) {
    if (level >= levels().size()) return unary();
    auto lhs = binary_level(level + 1);
    for (;;) {
      const BinOp* match = nullptr;
      for (const auto& b : levels()[level])
        if (at(b.text)) match = &b;
      if (!match) return lhs;
      Token t = next();
      auto rhs = binary_level(level + 1);
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Binary;
      e->loc = t.loc;
      e->op = match->op;
      e->args = {lhs, rhs};
      lhs = e;
    }
  }

  ExprPtr unary() {
    const Token t = peek();
    Opcode op;
    if (at("-")) op = Opcode::Neg;
    else if (at("!")) op = Opcode::LogNot;
    else if (at("~")) op = Opcode::BitNot;
    else if (at("+")) {
      next();
      return unary();
    } else return primary();
    next();
    auto operand = unary();
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->loc = t.loc;
    e->op = op;
    e->args = {operand};
    return e;
  }

  // Template arguments stop before relational operators so '>' closes the list.
  ExprPtr template_arg() {
    auto e = binary_level(kAdditiveLevel);
    return e;
  }

  int dim_suffix() {
    expect(".");
    Token t = peek();
    std::string d = ident();
    if (d == "x") return 0;
    if (d == "y") return 1;
    if (d == "z") return 2;
    fail(t, "expected .x, .y or .z");
  }

  ExprPtr primary() {
    const Token t = peek();
    auto e = std::make_shared<Expr>();
    e->loc = t.loc;
    if (t.kind == Tok::Int) {
      next();
      e->kind = ExprKind::IntLit;
      e->ival = t.ival;
      return e;
    }
    if (t.kind == Tok::Float) {
      next();
      e->kind = ExprKind::FloatLit;
      e->fval = t.fval;
      return e;
    }
    if (accept("(")) {
      auto inner = expression();
      expect(")");
      return inner;
    }
    if (t.kind != Tok::Ident) fail(t, "expected expression");
    next();
    const std::string& name = t.text;
    if (name == "threadIdx") {
      e->kind = ExprKind::ThreadIdx;
      e->dim = dim_suffix();
      return e;
    }
    if (name == "tid") {
      e->kind = ExprKind::ThreadIdx;
      e->dim = TidSource::kLinearTid;
      return e;
    }
    if (name == "blockDim") {
      e->kind = ExprKind::BlockDim;
      e->dim = dim_suffix();
      return e;
    }
    if (name == "fromThreadOrConst") return from_thread_or_const(t, e);
    if (name == "fromThreadOrMem") return from_thread_or_mem(t, e);
    if (at("(")) {
      static const std::set<std::string> kCalls = {"sqrt", "exp", "abs", "min", "max", "float", "int"};
      if (!kCalls.count(name)) fail(t, "unknown function '" + name + "'");
      next();
      e->kind = ExprKind::Call;
      e->name = name;
      if (!at(")")) {
        do {
          e->args.push_back(expression());
        } while (accept(","));
      }
      expect(")");
      std::size_t want = (name == "min" || name == "max") ? 2 : 1;
      if (e->args.size() != want) fail(t, "'" + name + "' takes " + std::to_string(want) + " argument(s)");
      return e;
    }
    if (at("[")) {
      if (!arrays_.count(name)) throw ParseError(t.loc.line, t.loc.col, "undeclared array '" + name + "'");
      return make_index(t, name, indices(t, name));
    }
    if (arrays_.count(name)) fail(t, "array '" + name + "' used without index");
    if (!lookup(name)) throw ParseError(t.loc.line, t.loc.col, "undeclared variable '" + name + "'");
    e->kind = ExprKind::Var;
    e->name = name;
    return e;
  }

  std::vector<ExprPtr> delta_arg(const Token& at_tok) {
    std::vector<ExprPtr> d;
    if (accept("{")) {
      do {
        d.push_back(template_arg());
      } while (accept(","));
      expect("}");
    } else {
      d.push_back(template_arg());
    }
    if (d.size() > 3) fail(at_tok, "delta takes at most 3 dimensions");
    for (const auto& x : d)
      if (!is_const_expr(*x)) throw ParseError(at_tok.loc.line, at_tok.loc.col, "non-constant template argument");
    return d;
  }

  ExprPtr const_template_arg(const Token& at_tok) {
    auto e = template_arg();
    if (!is_const_expr(*e)) throw ParseError(at_tok.loc.line, at_tok.loc.col, "non-constant template argument");
    return e;
  }

  ExprPtr from_thread_or_const(const Token& t, std::shared_ptr<Expr> e) {
    e->kind = ExprKind::FromThreadOrConst;
    expect("<");
    Token var_tok = peek();
    e->name = ident();
    comm_vars_.emplace_back(e->name, var_tok.loc);
    expect(",");
    e->delta = delta_arg(t);
    expect(",");
    e->constant = const_template_arg(t);
    if (accept(",")) e->window = const_template_arg(t);
    expect(">");
    expect("(");
    expect(")");
    return e;
  }

  ExprPtr from_thread_or_mem(const Token& t, std::shared_ptr<Expr> e) {
    e->kind = ExprKind::FromThreadOrMem;
    expect("<");
    e->delta = delta_arg(t);
    if (accept(",")) e->window = const_template_arg(t);
    expect(">");
    expect("(");
    Token arr_tok = peek();
    std::string arr = ident();
    if (!arrays_.count(arr)) throw ParseError(arr_tok.loc.line, arr_tok.loc.col, "undeclared array '" + arr + "'");
    e->name = arr;
    e->args = indices(arr_tok, arr);
    expect(",");
    e->predicate = expression();
    expect(")");
    return e;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::map<std::string, Sym>> scopes_;
  std::map<std::string, std::size_t> arrays_;
  std::set<std::string> all_locals_;
  std::vector<std::pair<std::string, SourceLoc>> comm_vars_;
};

void count_expr(const Expr& e, AstCounts& c) {
  switch (e.kind) {
    case ExprKind::Index: c.loads++; break;
    case ExprKind::FromThreadOrConst: c.from_thread_or_const++; break;
    case ExprKind::FromThreadOrMem: c.from_thread_or_mem++; break;
    default: break;
  }
  for (const auto& a : e.args)
    if (e.kind != ExprKind::FromThreadOrMem) count_expr(*a, c);
  if (e.predicate) count_expr(*e.predicate, c);
}

void count_stmt(const Stmt& s, AstCounts& c) {
  if (s.kind != StmtKind::Block) c.statements++;
  if (s.kind == StmtKind::Store) {
    c.stores++;
    for (const auto& i : s.indices) count_expr(*i, c);
  }
  if (s.kind == StmtKind::TagValue) c.tag_values++;
  if (s.value) count_expr(*s.value, c);
  for (const auto& b : s.body) count_stmt(*b, c);
  for (const auto& b : s.else_body) count_stmt(*b, c);
}

}  // namespace

namespace ast {
AstCounts count(const KernelAST& kernel) {
  AstCounts c;
  for (const auto& s : kernel.body) count_stmt(*s, c);
  return c;
}
}  // namespace ast

ast::KernelAST parse(std::string_view source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.run();
}

ast::KernelAST parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Stage::Frontend, "file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace dmt
