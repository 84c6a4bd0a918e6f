#pragma once

#include "mshot/ground.hpp"

namespace mshot {

// module (P, I, O): ground program with disjoint input and output atoms.
// Invariants: I ∩ O = ∅, heads(P) ⊆ O, atoms(P) ⊆ I ∪ O.
struct Module {
  std::vector<GroundRule> rules;  // P
  std::vector<Atom> inputs;       // I, sorted
  std::vector<Atom> outputs;      // O, sorted
};

struct CompositionViolation {
  enum class Kind : uint8_t { OutputOverlap, CrossModuleScc } kind;
  std::vector<Atom> witness;  // sorted
};

struct CompositionalityReport {
  bool ok = true;
  std::vector<CompositionViolation> violations;
};

struct NotCompositionalError : Error {
  CompositionalityReport report;
  NotCompositionalError(const std::string& msg, CompositionalityReport r)
      : Error(msg), report(std::move(r)) {}
};

// M = (P, (C ∪ E) \ heads(P), heads(P)); auxiliary atoms land in outputs
Module module_from_grounding(const Store& st, const GroundProgram& g,
                             const AtomBase& base);

// strongly connected components of the positive atom dependency graph;
// singleton components included, each set sorted
std::vector<std::vector<Atom>> sccs(const std::vector<GroundRule>& rules);

// output overlap and positive recursion across the two modules
CompositionalityReport check_compositional(const Store& st, const Module& a,
                                           const Module& b);

// (P₁∪P₂, (I₁\O₂) ∪ (I₂\O₁), O₁∪O₂); throws NotCompositionalError unless the
// report is ok (with lax, only output overlap is enforced)
Module join(const Store& st, const Module& a, const Module& b,
            bool lax = false);

}  // namespace mshot
