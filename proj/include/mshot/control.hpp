#pragma once

#include "mshot/solver.hpp"

namespace mshot {

enum class TruthValue : uint8_t { True, Undef, False };

struct ControlOptions {
  // constant definitions (-c name=value), substituted before grounding
  std::vector<std::pair<std::string, TermPtr>> consts;
  bool lax_composition = false;  // cross-module loops warn instead of throw
  bool simplify_facts = false;
  size_t max_instances = 1000000;
  Logger log;    // warnings; null = stderr
  Logger trace;  // one line per state operation; null = off
};

// a system state: non-ground subprograms R, the module grounded so far,
// the input assignment V, and the released-atom ledger
struct SystemState {
  Store store;
  SubprogramTable subprograms;           // R
  Module module;                         // joined module
  ExternalAssignment assignment;         // V, over module.inputs
  std::vector<MinElem> minimize_elems;   // accumulated across grounds
  std::vector<ShowSig> show_decls;       // accumulated across grounds
  std::vector<Atom> released;            // sorted by id
  std::vector<Atom> cleaned;             // dropped from the grounding base
  std::vector<Atom> fact_atoms;          // flagged certainly-true (cleanup)
  bool incmode = false;                  // saw #include <incmode>.
  uint64_t aux_counter = 0;              // fresh-atom group ids
  ControlOptions opts;
};

// one element of a ground instruction: subprogram name + ground argument terms
struct Part {
  std::string name;
  std::vector<TermPtr> args;
};

SystemState create(const std::string& text, const ControlOptions& opts = {});

// unions new subprograms into R; module and V untouched
void add(SystemState& s, const std::string& text);

// interns a ground atom (e.g. parsed from a script) into the state's store
Atom intern_atom(SystemState& s, const AstAtom& a);

// instantiates the named subprograms jointly against the current atom base
// and joins the resulting module; V keeps surviving inputs, new inputs
// default to false. Throws NotCompositionalError per the module laws.
void ground(SystemState& s, const std::vector<Part>& parts);

// three-valued input assignment; non-input atoms are left untouched
void assign_external(SystemState& s, Atom a, TruthValue v);

// moves an input atom to the outputs, permanently false; idempotent
void release_external(SystemState& s, Atom a);

// enumerates stable models under V and the given assumptions; when minimize
// elements exist, only optimal models are reported. Leaves (R, module, V,
// released) untouched. on_model (if set) sees each reported model in order
// before the result is returned.
using ModelCallback = std::function<void(const Model&)>;
SolveResult solve(SystemState& s, const Assumptions& a, int64_t limit = 0,
                  const ModelCallback& on_model = {});

// removes released and rule-less output atoms from the grounding base and
// flags fact-derivable atoms; stable models of later solves are unchanged
void cleanup(SystemState& s);

// show_decls-filtered view of a model (default: all non-auxiliary atoms)
std::vector<Atom> shown_atoms(const SystemState& s, const Model& m);

// structural encoding of (R, module, V, released) for equality checks
std::string state_signature(const SystemState& s);

}  // namespace mshot
