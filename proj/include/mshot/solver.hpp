#pragma once

#include "mshot/module.hpp"

namespace mshot {

// a model is the set of true atoms, sorted ascending by atom id
using Model = std::vector<Atom>;

// three-valued input assignment: everything not listed is false
struct ExternalAssignment {
  std::vector<Atom> tru;    // V^t
  std::vector<Atom> undef;  // V^u
};

// per-call filters: X is reported iff must_true ⊆ X and must_false ∩ X = ∅
struct Assumptions {
  std::vector<Atom> must_true, must_false;
};

struct CostVector {
  std::map<int64_t, int64_t> weights;  // priority -> total; absent means 0
  bool operator==(const CostVector& o) const { return weights == o.weights; }
};

// lexicographic, higher priority more significant; <0 means a is better
int cmp_cost(const CostVector& a, const CostVector& b);

enum class SolveStatus : uint8_t { Sat, Unsat };

struct SolveResult {
  SolveStatus status = SolveStatus::Unsat;
  std::vector<std::pair<Model, CostVector>> models;  // discovery order
  bool exhausted = true;  // false when cut off by the model limit
};

// what one solve call sees
struct SolveProgram {
  std::vector<GroundRule> rules;
  std::vector<Atom> inputs;
  std::vector<MinElem> minimize;
};

// {a} <- B turns into a <- B, ~a' and a' <- B, ~a with one fresh a' per
// choice rule; fresh atoms are excluded from reported models
struct ChoiceAux {
  Atom head = kNoAtom, aux = kNoAtom;
  std::vector<Atom> pos, neg;  // the choice rule's body
};

struct DesugarResult {
  std::vector<GroundRule> rules;  // Normal and Constraint only
  std::vector<ChoiceAux> choices;
};

DesugarResult desugar_choices(Store& st, const std::vector<GroundRule>& rules);

// the unique consistent extension of x to the fresh atoms
Model extend_choice_aux(const DesugarResult& d, const Model& x);

// Gelfond-Lifschitz reduct; rules must be choice-free
std::vector<GroundRule> reduct(const std::vector<GroundRule>& rules,
                               const Model& x);

// least model of a negation-free program (constraints ignored)
Model minimal_model(const std::vector<GroundRule>& rules);

// x = minimal_model(reduct(rules, x)) and all constraints hold
bool is_stable(const std::vector<GroundRule>& rules, const Model& x);

// stable models of rules + {x. | x in V^t} + {{x}. | x in V^u}, filtered by
// the assumptions; limit 0 means all. Completion-based search with a
// stability check per candidate.
SolveResult enumerate_stable(Store& st, const SolveProgram& p,
                             const ExternalAssignment& v, const Assumptions& a,
                             int64_t limit = 0, const Logger& log = {});

// checks every subset of the candidate atoms (rule heads plus undefined
// inputs); throws when there are more than 24 of them
std::vector<Model> brute_force_stable(Store& st,
                                      const std::vector<GroundRule>& rules,
                                      const std::vector<Atom>& inputs,
                                      const ExternalAssignment& v);

// per priority, sum of weights over distinct (weight, priority, tuple) keys
// whose condition holds in x; every priority of elems gets an entry
CostVector cost(const Store& st, const Model& x,
                const std::vector<MinElem>& elems);

// enumerate-and-bound: the cost-minimal models only
SolveResult optimize(Store& st, const SolveProgram& p,
                     const ExternalAssignment& v, const Assumptions& a,
                     const Logger& log = {});

// stable models with every input undefined (free)
std::vector<Model> module_stable_models(Store& st, const Module& m);

}  // namespace mshot
