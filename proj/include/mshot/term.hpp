#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mshot {

// ---------------------------------------------------------------------------
// Non-ground terms (parser/AST side). Immutable trees, freely shared.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermKind : uint8_t {
  Int,       // integer constant
  Const,     // lowercase symbolic constant
  Var,       // uppercase variable (non-ground only)
  Func,      // name(args...)
  BinOp,     // lhs op rhs, op in + - * / backslash
  Neg,       // unary minus
  Interval,  // lo..hi
  Pool,      // t1;t2;... alternatives
};

struct Term {
  TermKind kind;
  int64_t num = 0;            // Int
  std::string name;           // Const/Var/Func
  char op = 0;                // BinOp
  std::vector<TermPtr> args;  // Func args; BinOp/Interval two; Neg one; Pool alts

  static TermPtr mk_int(int64_t v);
  static TermPtr mk_const(std::string n);
  static TermPtr mk_var(std::string n);
  static TermPtr mk_func(std::string n, std::vector<TermPtr> a);
  static TermPtr mk_bin(char op, TermPtr l, TermPtr r);
  static TermPtr mk_neg(TermPtr t);
  static TermPtr mk_interval(TermPtr lo, TermPtr hi);
  static TermPtr mk_pool(std::vector<TermPtr> alts);
};

bool term_equal(const TermPtr& a, const TermPtr& b);
std::string term_str(const TermPtr& t);

// ---------------------------------------------------------------------------
// Ground terms and atoms, interned per Store. Ids are only meaningful
// relative to the Store that produced them; each SystemState owns one.
// ---------------------------------------------------------------------------

using Sym = uint32_t;
using GTerm = uint32_t;
using Atom = uint32_t;

constexpr Atom kNoAtom = UINT32_MAX;

enum class GKind : uint8_t { Int, Const, Func };

struct Store {
  // symbols
  Sym sym(std::string_view s);
  const std::string& sym_str(Sym s) const { return syms_[s]; }

  // ground terms
  GTerm g_int(int64_t v);
  GTerm g_const(Sym name);
  GTerm g_func(Sym name, std::vector<GTerm> args);

  GKind g_kind(GTerm t) const { return terms_[t].kind; }
  int64_t g_num(GTerm t) const { return terms_[t].num; }
  Sym g_name(GTerm t) const { return terms_[t].name; }
  const std::vector<GTerm>& g_args(GTerm t) const { return terms_[t].args; }

  // atoms: predicate symbol + ground argument terms
  Atom atom(Sym pred, std::vector<GTerm> args);
  std::optional<Atom> find_atom(Sym pred, const std::vector<GTerm>& args) const;
  Sym atom_pred(Atom a) const { return atoms_[a].pred; }
  const std::vector<GTerm>& atom_args(Atom a) const { return atoms_[a].args; }
  size_t atom_arity(Atom a) const { return atoms_[a].args.size(); }

  // total order: Int < Const < Func; ints numeric, consts lexicographic,
  // funcs by name, then arity, then args left to right
  int cmp_term(GTerm a, GTerm b) const;
  int cmp_atom(Atom a, Atom b) const;  // by predicate name, arity, args

  std::string term_to_string(GTerm t) const;
  std::string atom_to_string(Atom a) const;

  size_t num_atoms() const { return atoms_.size(); }

 private:
  struct TermNode {
    GKind kind;
    int64_t num = 0;
    Sym name = 0;
    std::vector<GTerm> args;
  };
  struct AtomNode {
    Sym pred;
    std::vector<GTerm> args;
  };

  std::vector<std::string> syms_;
  std::unordered_map<std::string, Sym> sym_ids_;
  std::vector<TermNode> terms_;
  std::unordered_map<std::string, GTerm> term_ids_;  // keyed by encoding
  std::vector<AtomNode> atoms_;
  std::unordered_map<std::string, Atom> atom_ids_;

  static std::string term_key(GKind k, int64_t num, Sym name,
                              const std::vector<GTerm>& args);
  static std::string atom_key(Sym pred, const std::vector<GTerm>& args);
};

// sorts by canonical order and drops duplicates
void sort_atoms(const Store& st, std::vector<Atom>& v);
void sort_terms(const Store& st, std::vector<GTerm>& v);

// errors ------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  int line, col;
  ParseError(int line, int col, const std::string& msg)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
};

struct GroundError : Error {
  using Error::Error;
};

struct NotCompositionalError;  // defined in module.hpp

}  // namespace mshot
