#include <algorithm>
#include <cassert>
#include <set>

#include "mshot/ast.hpp"

namespace mshot {

const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

CmpOp cmp_flip(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return op;
}

// mirror for "bound op #count{...}" -> "#count{...} op' bound"
static CmpOp cmp_mirror(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

// --- lexer ------------------------------------------------------------------

namespace {

enum class Tok : uint8_t {
  Ident, Var, Int, Directive,
  Dot, Comma, Semi, Colon, If,      // .  ,  ;  :  :-
  LParen, RParen, LBrace, RBrace,
  Dots,                             // ..
  Plus, Minus, Star, Slash, Backslash, At,
  Eq, Ne, Lt, Le, Gt, Ge,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int64_t num = 0;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line, col, msg);
  }

  char peek() const { return pos < src.size() ? src[pos] : '\0'; }
  char peek2() const { return pos + 1 < src.size() ? src[pos + 1] : '\0'; }

  void bump() {
    if (src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    for (;;) {
      char c = peek();
      if (c == '%') {
        while (peek() && peek() != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        return;
      }
    }
  }

  Token next() {
    skip_ws();
    Token t;
    t.line = line;
    t.col = col;
    char c = peek();
    if (!c) {
      t.kind = Tok::End;
      return t;
    }
    if (c == '_')
      fail("anonymous variables and '_' identifiers are not supported");
    if (isdigit(static_cast<unsigned char>(c))) {
      std::string n;
      while (isdigit(static_cast<unsigned char>(peek()))) {
        n += peek();
        bump();
      }
      t.kind = Tok::Int;
      t.num = std::stoll(n);
      return t;
    }
    if (isalpha(static_cast<unsigned char>(c))) {
      std::string n;
      while (isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        n += peek();
        bump();
      }
      t.kind = islower(static_cast<unsigned char>(n[0])) ? Tok::Ident : Tok::Var;
      t.text = std::move(n);
      return t;
    }
    if (c == '#') {
      bump();
      std::string n;
      while (isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        n += peek();
        bump();
      }
      if (n.empty()) fail("expected directive name after '#'");
      t.kind = Tok::Directive;
      t.text = std::move(n);
      return t;
    }
    bump();
    switch (c) {
      case '.':
        if (peek() == '.') {
          bump();
          t.kind = Tok::Dots;
        } else {
          t.kind = Tok::Dot;
        }
        return t;
      case ',': t.kind = Tok::Comma; return t;
      case ';': t.kind = Tok::Semi; return t;
      case ':':
        if (peek() == '-') {
          bump();
          t.kind = Tok::If;
        } else {
          t.kind = Tok::Colon;
        }
        return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '{': t.kind = Tok::LBrace; return t;
      case '}': t.kind = Tok::RBrace; return t;
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '\\': t.kind = Tok::Backslash; return t;
      case '@': t.kind = Tok::At; return t;
      case '=':
        if (peek() == '=') bump();  // accept == as =
        t.kind = Tok::Eq;
        return t;
      case '!':
        if (peek() == '=') {
          bump();
          t.kind = Tok::Ne;
          return t;
        }
        fail("unexpected '!'");
      case '<':
        if (peek() == '=') {
          bump();
          t.kind = Tok::Le;
        } else {
          t.kind = Tok::Lt;
        }
        return t;
      case '>':
        if (peek() == '=') {
          bump();
          t.kind = Tok::Ge;
        } else {
          t.kind = Tok::Gt;
        }
        return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

struct Parser {
  Lexer lex;
  Token tok;

  explicit Parser(const std::string& s) : lex(s) { tok = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok.line, tok.col, msg);
  }

  void advance() { tok = lex.next(); }

  bool at(Tok k) const { return tok.kind == k; }
  bool at_ident(const char* s) const {
    return tok.kind == Tok::Ident && tok.text == s;
  }

  void expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    advance();
  }

  static bool is_cmp(Tok k) {
    return k == Tok::Eq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le ||
           k == Tok::Gt || k == Tok::Ge;
  }

  CmpOp cmp_op() {
    CmpOp op;
    switch (tok.kind) {
      case Tok::Eq: op = CmpOp::Eq; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      default: fail("expected comparison operator");
    }
    advance();
    return op;
  }

  // term := addterm [".." addterm]
  TermPtr term() {
    TermPtr t = addterm();
    if (at(Tok::Dots)) {
      advance();
      TermPtr hi = addterm();
      return Term::mk_interval(std::move(t), std::move(hi));
    }
    return t;
  }

  TermPtr addterm() {
    TermPtr t = multerm();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      char op = at(Tok::Plus) ? '+' : '-';
      advance();
      t = Term::mk_bin(op, std::move(t), multerm());
    }
    return t;
  }

  TermPtr multerm() {
    TermPtr t = unterm();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Backslash)) {
      char op = at(Tok::Star) ? '*' : at(Tok::Slash) ? '/' : '\\';
      advance();
      t = Term::mk_bin(op, std::move(t), unterm());
    }
    return t;
  }

  TermPtr unterm() {
    if (at(Tok::Minus)) {
      advance();
      return Term::mk_neg(unterm());
    }
    return baseterm();
  }

  // a single argument position: term, or pool t1;t2;...
  TermPtr poolarg() {
    TermPtr t = term();
    if (!at(Tok::Semi)) return t;
    std::vector<TermPtr> alts{std::move(t)};
    while (at(Tok::Semi)) {
      advance();
      alts.push_back(term());
    }
    return Term::mk_pool(std::move(alts));
  }

  TermPtr baseterm() {
    if (at(Tok::Int)) {
      int64_t v = tok.num;
      advance();
      return Term::mk_int(v);
    }
    if (at(Tok::Var)) {
      std::string n = tok.text;
      advance();
      return Term::mk_var(std::move(n));
    }
    if (at(Tok::Ident)) {
      std::string n = tok.text;
      advance();
      if (at(Tok::LParen)) {
        advance();
        std::vector<TermPtr> args;
        if (!at(Tok::RParen)) {
          args.push_back(poolarg());
          while (at(Tok::Comma)) {
            advance();
            args.push_back(poolarg());
          }
        }
        expect(Tok::RParen, "')'");
        return Term::mk_func(std::move(n), std::move(args));
      }
      return Term::mk_const(std::move(n));
    }
    if (at(Tok::LParen)) {
      advance();
      TermPtr t = poolarg();
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("expected term");
  }

  AstAtom to_atom(TermPtr t) {
    if (t->kind == TermKind::Const) return {t->name, {}};
    if (t->kind == TermKind::Func) return {t->name, t->args};
    fail("expected atom");
  }

  AstAtom atom() { return to_atom(term()); }

  // literal := ["not"] atom | ["not"] comparison
  Literal literal() {
    bool neg = false;
    if (at_ident("not")) {
      neg = true;
      advance();
    }
    TermPtr t = term();
    if (is_cmp(tok.kind)) {
      CmpOp op = cmp_op();
      TermPtr rhs = term();
      if (neg) op = cmp_flip(op);
      Literal l;
      l.kind = Literal::Kind::Cmp;
      l.cmp = {op, std::move(t), std::move(rhs)};
      return l;
    }
    Literal l;
    l.kind = neg ? Literal::Kind::Not : Literal::Kind::Pos;
    l.atom = to_atom(std::move(t));
    return l;
  }

  std::vector<Literal> litlist() {
    std::vector<Literal> ls;
    ls.push_back(literal());
    while (at(Tok::Comma)) {
      advance();
      ls.push_back(literal());
    }
    return ls;
  }

  CountAgg count_agg() {
    // called at '#count'
    advance();
    expect(Tok::LBrace, "'{'");
    CountAgg agg;
    for (;;) {
      AggElem e;
      e.tuple.push_back(term());
      while (at(Tok::Comma)) {
        advance();
        e.tuple.push_back(term());
      }
      if (at(Tok::Colon)) {
        advance();
        e.cond = litlist();
      }
      agg.elems.push_back(std::move(e));
      if (at(Tok::Semi)) {
        advance();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "'}'");
    return agg;
  }

  BodyElem bodyelem() {
    if (at(Tok::Directive) && tok.text == "count") {
      BodyElem be;
      be.kind = BodyElem::Kind::Agg;
      be.agg = count_agg();
      be.agg.op = cmp_op();
      be.agg.bound = term();
      return be;
    }
    // bound-first aggregate: term op #count{...}
    if (at(Tok::Int) || at(Tok::Var) || at(Tok::Ident) || at(Tok::LParen) ||
        at(Tok::Minus)) {
      // tentative: parse as literal; a literal never starts with #count
      size_t save_pos = lex.pos;
      Token save_tok = tok;
      int save_line = lex.line, save_col = lex.col;
      TermPtr t = term();
      if (is_cmp(tok.kind)) {
        CmpOp op = cmp_op();
        if (at(Tok::Directive) && tok.text == "count") {
          BodyElem be;
          be.kind = BodyElem::Kind::Agg;
          be.agg = count_agg();
          be.agg.op = cmp_mirror(op);
          be.agg.bound = std::move(t);
          return be;
        }
      }
      lex.pos = save_pos;
      lex.line = save_line;
      lex.col = save_col;
      tok = save_tok;
    }
    BodyElem be;
    be.kind = BodyElem::Kind::Lit;
    be.lit = literal();
    return be;
  }

  std::vector<BodyElem> bodylist() {
    std::vector<BodyElem> body;
    body.push_back(bodyelem());
    while (at(Tok::Comma)) {
      advance();
      body.push_back(bodyelem());
    }
    return body;
  }

  Statement choice(std::optional<TermPtr> lb) {
    // called at '{'
    advance();
    Statement s;
    s.kind = Statement::Kind::Choice;
    s.lb = std::move(lb);
    if (!at(Tok::RBrace)) {
      for (;;) {
        ChoiceElem e;
        e.atom = atom();
        if (at(Tok::Colon)) {
          advance();
          e.cond = litlist();
        }
        s.elems.push_back(std::move(e));
        if (at(Tok::Semi)) {
          advance();
          continue;
        }
        break;
      }
    }
    expect(Tok::RBrace, "'}'");
    if (!at(Tok::Dot) && !at(Tok::If)) s.ub = term();
    if (at(Tok::If)) {
      advance();
      s.body = bodylist();
    }
    expect(Tok::Dot, "'.'");
    return s;
  }

  // returns zero or more statements (a #minimize with n elements yields n)
  std::vector<Statement> statement(bool& incmode) {
    std::vector<Statement> out;
    if (at(Tok::Directive)) {
      std::string d = tok.text;
      if (d == "include") {
        advance();
        expect(Tok::Lt, "'<'");
        if (!at_ident("incmode")) fail("only #include <incmode> is supported");
        advance();
        expect(Tok::Gt, "'>'");
        expect(Tok::Dot, "'.'");
        incmode = true;
        return out;
      }
      if (d == "program") {
        advance();
        Statement s;
        s.kind = Statement::Kind::Program;
        if (!at(Tok::Ident)) fail("expected subprogram name");
        s.prog_name = tok.text;
        advance();
        if (at(Tok::LParen)) {
          advance();
          if (!at(Tok::RParen)) {
            for (;;) {
              if (!at(Tok::Ident)) fail("expected parameter name");
              s.prog_params.push_back(tok.text);
              advance();
              if (at(Tok::Comma)) {
                advance();
                continue;
              }
              break;
            }
          }
          expect(Tok::RParen, "')'");
        }
        expect(Tok::Dot, "'.'");
        out.push_back(std::move(s));
        return out;
      }
      if (d == "external") {
        advance();
        Statement s;
        s.kind = Statement::Kind::External;
        s.head = atom();
        if (at(Tok::Colon)) {
          advance();
          for (Literal& l : litlist()) {
            BodyElem be;
            be.kind = BodyElem::Kind::Lit;
            be.lit = std::move(l);
            s.body.push_back(std::move(be));
          }
        }
        expect(Tok::Dot, "'.'");
        out.push_back(std::move(s));
        return out;
      }
      if (d == "show") {
        advance();
        Statement s;
        s.kind = Statement::Kind::Show;
        if (!at(Tok::Ident))
          fail("only '#show pred/arity.' is supported");
        s.show_pred = tok.text;
        advance();
        expect(Tok::Slash, "'/'");
        if (!at(Tok::Int)) fail("expected arity");
        s.show_arity = static_cast<int>(tok.num);
        advance();
        expect(Tok::Dot, "'.'");
        out.push_back(std::move(s));
        return out;
      }
      if (d == "minimize") {
        advance();
        expect(Tok::LBrace, "'{'");
        for (;;) {
          Statement s;
          s.kind = Statement::Kind::Minimize;
          s.weight = term();
          if (at(Tok::At)) {
            advance();
            s.priority = term();
          } else {
            s.priority = Term::mk_int(0);
          }
          while (at(Tok::Comma)) {
            advance();
            s.tuple.push_back(term());
          }
          if (at(Tok::Colon)) {
            advance();
            s.cond = litlist();
          }
          out.push_back(std::move(s));
          if (at(Tok::Semi)) {
            advance();
            continue;
          }
          break;
        }
        expect(Tok::RBrace, "'}'");
        expect(Tok::Dot, "'.'");
        return out;
      }
      fail("unsupported directive '#" + d + "'");
    }
    if (at(Tok::If)) {  // constraint
      advance();
      Statement s;
      s.kind = Statement::Kind::Constraint;
      s.body = bodylist();
      expect(Tok::Dot, "'.'");
      out.push_back(std::move(s));
      return out;
    }
    if (at(Tok::LBrace)) {
      out.push_back(choice(std::nullopt));
      return out;
    }
    // term-led: choice with lower bound, or a rule
    TermPtr t = term();
    if (at(Tok::LBrace)) {
      out.push_back(choice(std::optional<TermPtr>(std::move(t))));
      return out;
    }
    Statement s;
    s.kind = Statement::Kind::Rule;
    s.head = to_atom(std::move(t));
    if (at(Tok::If)) {
      advance();
      s.body = bodylist();
    }
    expect(Tok::Dot, "'.'");
    out.push_back(std::move(s));
    return out;
  }
};

// --- safety -----------------------------------------------------------------

// variables at binding positions: direct argument positions, possibly nested
// inside function terms, but not under arithmetic, intervals, or pools
void binding_vars(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case TermKind::Var:
      out.insert(t->name);
      break;
    case TermKind::Func:
      for (const auto& a : t->args) binding_vars(a, out);
      break;
    default:
      break;
  }
}

void all_vars(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == TermKind::Var) out.insert(t->name);
  for (const auto& a : t->args) all_vars(a, out);
}

void all_vars_atom(const AstAtom& a, std::set<std::string>& out) {
  for (const auto& t : a.args) all_vars(t, out);
}

void all_vars_lit(const Literal& l, std::set<std::string>& out) {
  if (l.kind == Literal::Kind::Cmp) {
    all_vars(l.cmp.lhs, out);
    all_vars(l.cmp.rhs, out);
  } else {
    all_vars_atom(l.atom, out);
  }
}

static void bound_by_lits(const std::vector<Literal>& lits,
                          std::set<std::string>& out) {
  for (const Literal& l : lits)
    if (l.kind == Literal::Kind::Pos)
      for (const auto& t : l.atom.args) binding_vars(t, out);
}

static void check_covered(const std::set<std::string>& need,
                          const std::set<std::string>& have,
                          const char* where) {
  for (const auto& v : need)
    if (!have.count(v))
      throw Error("unsafe variable '" + v + "' in " + where);
}

static void safety_check(const Statement& s, int line, int col) {
  try {
    std::set<std::string> global_bound;
    std::vector<Literal> body_lits;
    for (const BodyElem& be : s.body)
      if (be.kind == BodyElem::Kind::Lit) body_lits.push_back(be.lit);
    bound_by_lits(body_lits, global_bound);

    // vars needed at the statement's global level
    std::set<std::string> need;
    switch (s.kind) {
      case Statement::Kind::Rule:
        all_vars_atom(s.head, need);
        break;
      case Statement::Kind::External:
        all_vars_atom(s.head, need);
        break;
      case Statement::Kind::Choice:
        if (s.lb) all_vars(*s.lb, need);
        if (s.ub) all_vars(*s.ub, need);
        break;
      default:
        break;
    }
    for (const Literal& l : body_lits) all_vars_lit(l, need);
    check_covered(need, global_bound, "rule");

    // aggregate elements: local vars must be bound by the element's own
    // positive condition literals (or globally)
    for (const BodyElem& be : s.body) {
      if (be.kind != BodyElem::Kind::Agg) continue;
      std::set<std::string> bnd;
      all_vars(be.agg.bound, bnd);
      check_covered(bnd, global_bound, "aggregate bound");
      for (const AggElem& e : be.agg.elems) {
        std::set<std::string> local = global_bound;
        bound_by_lits(e.cond, local);
        std::set<std::string> lneed;
        for (const auto& t : e.tuple) all_vars(t, lneed);
        for (const Literal& l : e.cond) all_vars_lit(l, lneed);
        check_covered(lneed, local, "aggregate element");
      }
    }

    // choice elements
    for (const ChoiceElem& e : s.elems) {
      std::set<std::string> local = global_bound;
      bound_by_lits(e.cond, local);
      std::set<std::string> lneed;
      all_vars_atom(e.atom, lneed);
      for (const Literal& l : e.cond) all_vars_lit(l, lneed);
      check_covered(lneed, local, "choice element");
    }

    // minimize
    if (s.kind == Statement::Kind::Minimize) {
      std::set<std::string> local;
      bound_by_lits(s.cond, local);
      std::set<std::string> lneed;
      all_vars(s.weight, lneed);
      all_vars(s.priority, lneed);
      for (const auto& t : s.tuple) all_vars(t, lneed);
      for (const Literal& l : s.cond) all_vars_lit(l, lneed);
      check_covered(lneed, local, "minimize element");
    }
  } catch (const Error& e) {
    throw ParseError(line, col, e.what() + std::string(" (safety)"));
  }
}

}  // namespace

// --- entry points -----------------------------------------------------------

ParseResult parse_source(const std::string& text) {
  Parser p(text);
  ParseResult r;
  while (!p.at(Tok::End)) {
    int line = p.tok.line, col = p.tok.col;
    for (Statement& s : p.statement(r.incmode)) {
      safety_check(s, line, col);
      r.stmts.push_back(std::move(s));
    }
  }
  return r;
}

std::vector<Statement> parse_program(const std::string& text) {
  return parse_source(text).stmts;
}

TermPtr parse_term_text(const std::string& text) {
  Parser p(text);
  TermPtr t = p.term();
  if (!p.at(Tok::End)) p.fail("trailing input after term");
  return t;
}

AstAtom parse_atom_text(const std::string& text) {
  Parser p(text);
  AstAtom a = p.atom();
  if (!p.at(Tok::End)) p.fail("trailing input after atom");
  return a;
}

// --- split / substitute ------------------------------------------------------

SubprogramTable split_subprograms(const std::vector<Statement>& stmts) {
  SubprogramTable table;
  table["base"];  // base always present
  std::string cur = "base";
  for (const Statement& s : stmts) {
    if (s.kind == Statement::Kind::Program) {
      cur = s.prog_name;
      auto it = table.find(cur);
      if (it == table.end()) {
        table[cur].params = s.prog_params;
      } else if (it->second.params != s.prog_params) {
        throw Error("conflicting parameter list for subprogram '" + cur + "'");
      }
      continue;
    }
    auto& sub = table[cur];
    bool dup = false;
    for (const Statement& t : sub.stmts)
      if (stmt_equal(t, s)) {
        dup = true;
        break;
      }
    if (!dup) sub.stmts.push_back(s);
  }
  return table;
}

void merge_subprograms(SubprogramTable& dst, const SubprogramTable& src) {
  for (const auto& [name, sub] : src) {
    auto it = dst.find(name);
    if (it == dst.end()) {
      dst[name] = sub;
      continue;
    }
    if (it->second.params != sub.params)
      throw Error("conflicting parameter list for subprogram '" + name + "'");
    for (const Statement& s : sub.stmts) {
      bool dup = false;
      for (const Statement& t : it->second.stmts)
        if (stmt_equal(t, s)) {
          dup = true;
          break;
        }
      if (!dup) it->second.stmts.push_back(s);
    }
  }
}

namespace {

using Subst = std::map<std::string, TermPtr>;

TermPtr subst_term(const TermPtr& t, const Subst& m) {
  switch (t->kind) {
    case TermKind::Const: {
      auto it = m.find(t->name);
      return it != m.end() ? it->second : t;
    }
    case TermKind::Int:
    case TermKind::Var:
      return t;
    default: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        args.push_back(subst_term(a, m));
        changed |= args.back() != a;
      }
      if (!changed) return t;
      auto n = std::make_shared<Term>(*t);
      n->args = std::move(args);
      return n;
    }
  }
}

AstAtom subst_atom(const AstAtom& a, const Subst& m) {
  AstAtom out{a.pred, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(subst_term(t, m));
  return out;
}

Literal subst_lit(const Literal& l, const Subst& m) {
  Literal out = l;
  if (l.kind == Literal::Kind::Cmp) {
    out.cmp.lhs = subst_term(l.cmp.lhs, m);
    out.cmp.rhs = subst_term(l.cmp.rhs, m);
  } else {
    out.atom = subst_atom(l.atom, m);
  }
  return out;
}

}  // namespace

std::vector<Statement> substitute(const std::vector<Statement>& stmts,
                                  const std::vector<std::string>& params,
                                  const std::vector<TermPtr>& values) {
  if (params.size() != values.size())
    throw Error("subprogram arity mismatch: expected " +
                std::to_string(params.size()) + " arguments, got " +
                std::to_string(values.size()));
  Subst m;
  for (size_t i = 0; i < params.size(); ++i) m[params[i]] = values[i];
  std::vector<Statement> out;
  out.reserve(stmts.size());
  for (const Statement& s : stmts) {
    Statement n = s;
    n.head = subst_atom(s.head, m);
    n.body.clear();
    for (const BodyElem& be : s.body) {
      BodyElem nbe = be;
      if (be.kind == BodyElem::Kind::Lit) {
        nbe.lit = subst_lit(be.lit, m);
      } else {
        nbe.agg.bound = subst_term(be.agg.bound, m);
        nbe.agg.elems.clear();
        for (const AggElem& e : be.agg.elems) {
          AggElem ne;
          for (const auto& t : e.tuple) ne.tuple.push_back(subst_term(t, m));
          for (const Literal& l : e.cond) ne.cond.push_back(subst_lit(l, m));
          nbe.agg.elems.push_back(std::move(ne));
        }
      }
      n.body.push_back(std::move(nbe));
    }
    if (s.lb) n.lb = subst_term(*s.lb, m);
    if (s.ub) n.ub = subst_term(*s.ub, m);
    n.elems.clear();
    for (const ChoiceElem& e : s.elems) {
      ChoiceElem ne;
      ne.atom = subst_atom(e.atom, m);
      for (const Literal& l : e.cond) ne.cond.push_back(subst_lit(l, m));
      n.elems.push_back(std::move(ne));
    }
    if (s.weight) n.weight = subst_term(s.weight, m);
    if (s.priority) n.priority = subst_term(s.priority, m);
    n.tuple.clear();
    for (const auto& t : s.tuple) n.tuple.push_back(subst_term(t, m));
    n.cond.clear();
    for (const Literal& l : s.cond) n.cond.push_back(subst_lit(l, m));
    out.push_back(std::move(n));
  }
  return out;
}

// --- render / equality --------------------------------------------------------

namespace {

std::string atom_render(const AstAtom& a) {
  std::string out = a.pred;
  if (!a.args.empty()) {
    out += '(';
    for (size_t i = 0; i < a.args.size(); ++i) {
      if (i) out += ',';
      out += term_str(a.args[i]);
    }
    out += ')';
  }
  return out;
}

std::string lit_render(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Pos:
      return atom_render(l.atom);
    case Literal::Kind::Not:
      return "not " + atom_render(l.atom);
    case Literal::Kind::Cmp:
      return term_str(l.cmp.lhs) + " " + cmp_str(l.cmp.op) + " " +
             term_str(l.cmp.rhs);
  }
  return {};
}

std::string lits_render(const std::vector<Literal>& ls) {
  std::string out;
  for (size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ", ";
    out += lit_render(ls[i]);
  }
  return out;
}

std::string agg_render(const CountAgg& agg) {
  std::string out = "#count{ ";
  for (size_t i = 0; i < agg.elems.size(); ++i) {
    if (i) out += " ; ";
    const AggElem& e = agg.elems[i];
    for (size_t j = 0; j < e.tuple.size(); ++j) {
      if (j) out += ',';
      out += term_str(e.tuple[j]);
    }
    if (!e.cond.empty()) {
      out += " : ";
      out += lits_render(e.cond);
    }
  }
  out += " } ";
  out += cmp_str(agg.op);
  out += ' ';
  out += term_str(agg.bound);
  return out;
}

std::string body_render(const std::vector<BodyElem>& body) {
  std::string out;
  for (size_t i = 0; i < body.size(); ++i) {
    if (i) out += ", ";
    if (body[i].kind == BodyElem::Kind::Lit)
      out += lit_render(body[i].lit);
    else
      out += agg_render(body[i].agg);
  }
  return out;
}

}  // namespace

std::string render(const Statement& s) {
  switch (s.kind) {
    case Statement::Kind::Rule: {
      std::string out = atom_render(s.head);
      if (!s.body.empty()) out += " :- " + body_render(s.body);
      return out + ".";
    }
    case Statement::Kind::Constraint:
      return ":- " + body_render(s.body) + ".";
    case Statement::Kind::Choice: {
      std::string out;
      if (s.lb) out += term_str(*s.lb) + " ";
      out += "{ ";
      for (size_t i = 0; i < s.elems.size(); ++i) {
        if (i) out += " ; ";
        out += atom_render(s.elems[i].atom);
        if (!s.elems[i].cond.empty()) out += " : " + lits_render(s.elems[i].cond);
      }
      out += " }";
      if (s.ub) out += " " + term_str(*s.ub);
      if (!s.body.empty()) out += " :- " + body_render(s.body);
      return out + ".";
    }
    case Statement::Kind::External: {
      std::string out = "#external " + atom_render(s.head);
      if (!s.body.empty()) out += " : " + body_render(s.body);
      return out + ".";
    }
    case Statement::Kind::Show:
      return "#show " + s.show_pred + "/" + std::to_string(s.show_arity) + ".";
    case Statement::Kind::Minimize: {
      std::string out = "#minimize{ " + term_str(s.weight) + "@" +
                        term_str(s.priority);
      for (const auto& t : s.tuple) out += "," + term_str(t);
      if (!s.cond.empty()) out += " : " + lits_render(s.cond);
      return out + " }.";
    }
    case Statement::Kind::Program: {
      std::string out = "#program " + s.prog_name;
      if (!s.prog_params.empty()) {
        out += '(';
        for (size_t i = 0; i < s.prog_params.size(); ++i) {
          if (i) out += ',';
          out += s.prog_params[i];
        }
        out += ')';
      }
      return out + ".";
    }
  }
  return {};
}

std::string render(const std::vector<Statement>& stmts) {
  std::string out;
  for (const Statement& s : stmts) {
    out += render(s);
    out += '\n';
  }
  return out;
}

bool stmt_equal(const Statement& a, const Statement& b) {
  return a.kind == b.kind && render(a) == render(b);
}

}  // namespace mshot
