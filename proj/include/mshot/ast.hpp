#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mshot/term.hpp"

namespace mshot {

struct AstAtom {
  std::string pred;
  std::vector<TermPtr> args;
};

enum class CmpOp : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_str(CmpOp op);
CmpOp cmp_flip(CmpOp op);  // negation, e.g. not (a < b) == a >= b

struct Comparison {
  CmpOp op;
  TermPtr lhs, rhs;
};

// body literal; negated comparisons are stored with the flipped operator
struct Literal {
  enum class Kind : uint8_t { Pos, Not, Cmp } kind;
  AstAtom atom;    // Pos/Not
  Comparison cmp;  // Cmp
};

struct AggElem {
  std::vector<TermPtr> tuple;
  std::vector<Literal> cond;
};

// #count{ tuple : cond ; ... } op bound, in rule bodies only
struct CountAgg {
  CmpOp op;
  TermPtr bound;
  std::vector<AggElem> elems;
};

struct BodyElem {
  enum class Kind : uint8_t { Lit, Agg } kind;
  Literal lit;
  CountAgg agg;
};

struct ChoiceElem {
  AstAtom atom;
  std::vector<Literal> cond;
};

struct Statement {
  enum class Kind : uint8_t {
    Rule,        // head :- body.      (facts have empty body)
    Constraint,  // :- body.
    Choice,      // lb { elems } ub :- body.
    External,    // #external atom : cond.
    Show,        // #show pred/arity.
    Minimize,    // #minimize{ w@p,tuple : cond }.  one element per statement
    Program,     // #program name(params).
  } kind;

  AstAtom head;                      // Rule head, External atom
  std::vector<BodyElem> body;        // Rule/Constraint/Choice; External cond
                                     // (literals only)
  std::optional<TermPtr> lb, ub;     // Choice bounds
  std::vector<ChoiceElem> elems;     // Choice elements
  std::string show_pred;             // Show
  int show_arity = 0;                // Show
  TermPtr weight, priority;          // Minimize (priority defaults to 0)
  std::vector<TermPtr> tuple;        // Minimize
  std::vector<Literal> cond;         // Minimize condition
  std::string prog_name;             // Program
  std::vector<std::string> prog_params;
};

bool stmt_equal(const Statement& a, const Statement& b);

struct ParseResult {
  std::vector<Statement> stmts;
  bool incmode = false;  // saw #include <incmode>.
};

// parses source text; throws ParseError (with line/col) on bad input,
// including safety violations
ParseResult parse_source(const std::string& text);
std::vector<Statement> parse_program(const std::string& text);

// groups statements by enclosing #program scope; statements before any
// #program go to base()
struct Subprogram {
  std::vector<std::string> params;
  std::vector<Statement> stmts;
};

using SubprogramTable = std::map<std::string, Subprogram>;

// unions scopes with the same name; throws on conflicting parameter lists
SubprogramTable split_subprograms(const std::vector<Statement>& stmts);

// merges src into dst (set union per name; duplicates dropped)
void merge_subprograms(SubprogramTable& dst, const SubprogramTable& src);

// replaces parameter constants by ground terms, no arithmetic evaluation
std::vector<Statement> substitute(const std::vector<Statement>& stmts,
                                  const std::vector<std::string>& params,
                                  const std::vector<TermPtr>& values);

std::string render(const Statement& s);
std::string render(const std::vector<Statement>& stmts);

// parses a single ground term / ground atom, e.g. for CLI arguments
TermPtr parse_term_text(const std::string& text);
AstAtom parse_atom_text(const std::string& text);

}  // namespace mshot
