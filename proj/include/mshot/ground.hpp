#pragma once

#include <functional>
#include <map>

#include "mshot/ast.hpp"
#include "mshot/term.hpp"

namespace mshot {

using Logger = std::function<void(const std::string&)>;

struct GroundRule {
  enum class Kind : uint8_t { Normal, Constraint, Choice } kind;
  Atom head = kNoAtom;          // Normal/Choice
  std::vector<Atom> pos, neg;   // sorted by canonical order, deduped

  bool operator==(const GroundRule& o) const {
    return kind == o.kind && head == o.head && pos == o.pos && neg == o.neg;
  }
};

struct MinElem {
  int64_t weight = 0;
  int64_t priority = 0;
  std::vector<GTerm> tuple;
  std::vector<Atom> pos, neg;  // condition
};

struct ShowSig {
  Sym pred;
  int arity;
  bool operator==(const ShowSig& o) const {
    return pred == o.pred && arity == o.arity;
  }
  bool operator<(const ShowSig& o) const {
    return pred != o.pred ? pred < o.pred : arity < o.arity;
  }
};

struct GroundProgram {
  std::vector<GroundRule> rules;
  std::vector<Atom> externals;  // E: heads of surviving external declarations
  std::vector<MinElem> minimize;
  std::vector<ShowSig> shows;
  std::vector<Atom> facts;      // heads flagged certainly-true
};

// atom base the instantiation is relative to (C in the contextual semantics)
struct AtomBase {
  std::vector<Atom> atoms;  // sorted
  std::vector<Atom> facts;  // sorted subset of atoms
};

struct GroundOptions {
  size_t max_instances = 1000000;
  bool simplify_facts = false;  // drop certainly-true positive body atoms
  Logger log;                   // warnings; null = stderr
  uint64_t aux_start = 0;       // first fresh-atom group id
  uint64_t* aux_next = nullptr; // out: next unused group id
};

// evaluates a ground term; multi-valued because of intervals and pools.
// Non-integer arithmetic and division by zero yield an empty result.
std::vector<GTerm> eval_term(Store& st, const TermPtr& t);

// contextual instantiation of parameter-free statements against `base`.
// Statements are processed bottom-up along the SCCs of the predicate
// dependency graph; rule instances are kept only if their positive body is
// contained in the derivable base, negative literals over underivable atoms
// are erased. Count aggregates and choice bounds are compiled to fresh
// __-prefixed auxiliary atoms.
GroundProgram instantiate(Store& st, const std::vector<Statement>& stmts,
                          const AtomBase& base, const GroundOptions& opts = {});

// predicate-level positive dependency graph of a ground program:
// edges head -> positive body atoms (atom-level, for SCC checks)
std::map<Atom, std::vector<Atom>> dependency_graph(
    const std::vector<GroundRule>& rules);

// removes certainly-true atoms from positive rule bodies; the stable models
// are unchanged
std::vector<GroundRule> simplify_with_facts(const std::vector<GroundRule>& rules,
                                            const std::vector<Atom>& facts);

// deterministic text dump; one line per rule, then #external lines;
// optionally #input lines (for module serialization)
std::string dump_ground(const Store& st, const std::vector<GroundRule>& rules,
                        const std::vector<Atom>& externals,
                        const std::vector<Atom>& inputs = {},
                        bool with_inputs = false);

std::string rule_to_string(const Store& st, const GroundRule& r);

}  // namespace mshot
