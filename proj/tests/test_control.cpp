#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mshot/control.hpp"

using namespace mshot;

namespace {

const char* kSimple =
    "#external p(1;2;3).\n"
    "p(0) :- p(3).\n"
    "p(0) :- not p(0).\n"
    "\n"
    "#program succ(n).\n"
    "#external p(n+3).\n"
    "p(n) :- p(n+3).\n"
    "p(n) :- not p(n+1), not p(n+2).\n";

const char* kListing1 = "a(1).\na(2).\n\n#program acid(k).\nb(k).\nc(X,k) :- a(X).\n";

const char* kListing4 =
    "f(1). f(2).\n#external e(X) : f(X), X < 2.\n"
    "a(X) :- f(X), e(X).\nb(X) :- f(X), not e(X).\n";

Part part(const std::string& name, std::vector<int64_t> args = {}) {
  Part p;
  p.name = name;
  for (int64_t v : args) p.args.push_back(Term::mk_int(v));
  return p;
}

Atom at(SystemState& s, const std::string& text) {
  return intern_atom(s, parse_atom_text(text));
}

std::vector<std::string> strs(const SystemState& s, std::vector<Atom> v) {
  std::vector<std::string> out;
  for (Atom a : v) out.push_back(s.store.atom_to_string(a));
  std::sort(out.begin(), out.end());
  return out;
}

std::multiset<std::string> rule_set(const SystemState& s) {
  std::multiset<std::string> out;
  for (const GroundRule& r : s.module.rules)
    out.insert(rule_to_string(s.store, r));
  return out;
}

std::set<std::set<std::string>> result_sets(const SystemState& s,
                                            const SolveResult& r) {
  std::set<std::set<std::string>> out;
  for (const auto& [m, c] : r.models) {
    std::set<std::string> x;
    for (Atom a : m) x.insert(s.store.atom_to_string(a));
    out.insert(x);
  }
  return out;
}

ControlOptions quiet() {
  ControlOptions o;
  o.log = [](const std::string&) {};
  return o;
}

}  // namespace

TEST_CASE("create splits subprograms and starts from the empty module") {
  SystemState s = create(kSimple);
  REQUIRE(s.subprograms.count("base") == 1);
  REQUIRE(s.subprograms.count("succ") == 1);
  CHECK(s.subprograms["base"].stmts.size() == 3);
  CHECK(s.subprograms["succ"].stmts.size() == 3);
  CHECK(s.module.rules.empty());
  CHECK(s.module.inputs.empty());
  CHECK(s.module.outputs.empty());
  CHECK(s.assignment.tru.empty());
  CHECK(s.assignment.undef.empty());

  SystemState e = create("");
  for (const auto& [name, sub] : e.subprograms) CHECK(sub.stmts.empty());
}

TEST_CASE("solve on the empty state yields one empty model") {
  SystemState s = create("");
  SolveResult r = solve(s, {});
  CHECK(r.status == SolveStatus::Sat);
  REQUIRE(r.models.size() == 1);
  CHECK(r.models[0].first.empty());
}

TEST_CASE("add unions into existing subprograms") {
  SystemState s = create("a.");
  add(s, "b :- a.");
  add(s, "#program extra.\nc.\n");
  CHECK(s.subprograms["base"].stmts.size() == 2);
  CHECK(s.subprograms.count("extra") == 1);
  ground(s, {part("base"), part("extra")});
  SolveResult r = solve(s, {});
  CHECK(result_sets(s, r) ==
        std::set<std::set<std::string>>{{"a", "b", "c"}});
}

TEST_CASE("the worked multi-shot run produces the documented state ledger") {
  SystemState s = create(kSimple);

  ground(s, {part("base")});
  CHECK(rule_set(s) ==
        std::multiset<std::string>{"p(0) :- p(3).", "p(0) :- not p(0)."});
  CHECK(strs(s, s.module.inputs) ==
        std::vector<std::string>{"p(1)", "p(2)", "p(3)"});
  CHECK(strs(s, s.module.outputs) == std::vector<std::string>{"p(0)"});
  CHECK(s.assignment.tru.empty());

  assign_external(s, at(s, "p(3)"), TruthValue::True);
  CHECK(strs(s, s.assignment.tru) == std::vector<std::string>{"p(3)"});

  SolveResult r1 = solve(s, {});
  CHECK(result_sets(s, r1) ==
        std::set<std::set<std::string>>{{"p(0)", "p(3)"}});

  assign_external(s, at(s, "p(3)"), TruthValue::False);
  CHECK(s.assignment.tru.empty());

  SolveResult r2 = solve(s, {});
  CHECK(r2.status == SolveStatus::Unsat);
  CHECK(r2.models.empty());

  ground(s, {part("succ", {1}), part("succ", {2})});
  CHECK(rule_set(s) ==
        std::multiset<std::string>{
            "p(0) :- p(3).", "p(0) :- not p(0).", "p(1) :- p(4).",
            "p(1) :- not p(2), not p(3).", "p(2) :- p(5).",
            "p(2) :- not p(3), not p(4)."});
  CHECK(strs(s, s.module.inputs) ==
        std::vector<std::string>{"p(3)", "p(4)", "p(5)"});
  CHECK(strs(s, s.module.outputs) ==
        std::vector<std::string>{"p(0)", "p(1)", "p(2)"});

  SolveResult r3 = solve(s, {});
  CHECK(r3.status == SolveStatus::Unsat);

  ground(s, {part("succ", {3})});
  CHECK(rule_set(s).size() == 8);
  CHECK(rule_set(s).count("p(3) :- p(6).") == 1);
  CHECK(rule_set(s).count("p(3) :- not p(4), not p(5).") == 1);
  CHECK(strs(s, s.module.inputs) ==
        std::vector<std::string>{"p(4)", "p(5)", "p(6)"});
  CHECK(strs(s, s.module.outputs) ==
        std::vector<std::string>{"p(0)", "p(1)", "p(2)", "p(3)"});

  SolveResult r4 = solve(s, {});
  CHECK(result_sets(s, r4) ==
        std::set<std::set<std::string>>{{"p(0)", "p(3)"}});
}

TEST_CASE("grounding order changes the contextual instantiation") {
  SystemState s1 = create(kListing1);
  ground(s1, {part("base")});
  ground(s1, {part("acid", {42})});
  CHECK(rule_set(s1) ==
        std::multiset<std::string>{"a(1).", "a(2).", "b(42).",
                                   "c(1,42) :- a(1).", "c(2,42) :- a(2)."});

  SystemState s2 = create(kListing1);
  ground(s2, {part("acid", {42})});
  ground(s2, {part("base")});
  CHECK(rule_set(s2) ==
        std::multiset<std::string>{"a(1).", "a(2).", "b(42)."});

  // joint grounding treats both parts as one program
  SystemState s3 = create(kListing1);
  ground(s3, {part("base"), part("acid", {42})});
  CHECK(rule_set(s3) == rule_set(s1));
}

TEST_CASE("duplicate parts in one call equal a single occurrence") {
  SystemState s1 = create(kListing1);
  ground(s1, {part("acid", {42}), part("acid", {42})});
  SystemState s2 = create(kListing1);
  ground(s2, {part("acid", {42})});
  CHECK(state_signature(s1) == state_signature(s2));
}

TEST_CASE("grounding the same part twice is a redefinition error") {
  SystemState s = create(kListing1);
  ground(s, {part("acid", {7})});
  CHECK_THROWS_AS(ground(s, {part("acid", {7})}), NotCompositionalError);
  // a different instantiation is fine
  CHECK_NOTHROW(ground(s, {part("acid", {8})}));
}

TEST_CASE("unknown subprogram and arity mismatches are errors") {
  SystemState s = create(kListing1);
  CHECK_THROWS_AS(ground(s, {part("nope")}), Error);
  CHECK_THROWS_AS(ground(s, {part("acid")}), Error);
  CHECK_THROWS_AS(ground(s, {part("base", {1})}), Error);
}

TEST_CASE("assigning false right after grounding changes nothing") {
  SystemState s = create(kListing4);
  ground(s, {part("base")});
  std::string before = state_signature(s);
  assign_external(s, at(s, "e(1)"), TruthValue::False);
  CHECK(state_signature(s) == before);
}

TEST_CASE("solve examples on the externals state") {
  SystemState s = create(kListing4);
  ground(s, {part("base")});

  SolveResult r1 = solve(s, {});
  CHECK(result_sets(s, r1) ==
        std::set<std::set<std::string>>{{"f(1)", "f(2)", "b(1)", "b(2)"}});

  Assumptions no_b1;
  no_b1.must_false = {at(s, "b(1)")};
  SolveResult r2 = solve(s, no_b1);
  CHECK(r2.status == SolveStatus::Unsat);

  assign_external(s, at(s, "e(1)"), TruthValue::Undef);
  SolveResult r3 = solve(s, {});
  CHECK(result_sets(s, r3) ==
        std::set<std::set<std::string>>{
            {"e(1)", "f(1)", "f(2)", "a(1)", "b(2)"},
            {"f(1)", "f(2)", "b(1)", "b(2)"}});

  assign_external(s, at(s, "e(1)"), TruthValue::True);
  SolveResult r4 = solve(s, {});
  CHECK(result_sets(s, r4) ==
        std::set<std::set<std::string>>{
            {"e(1)", "f(1)", "f(2)", "a(1)", "b(2)"}});
}

TEST_CASE("solve leaves the state intact") {
  SystemState s = create(kSimple);
  ground(s, {part("base")});
  assign_external(s, at(s, "p(3)"), TruthValue::Undef);
  std::string before = state_signature(s);
  solve(s, {});
  Assumptions a;
  a.must_true = {at(s, "p(0)")};
  solve(s, a, 1);
  CHECK(state_signature(s) == before);
}

TEST_CASE("solve reports models through the callback in order") {
  SystemState s = create("{ a }.");
  ground(s, {part("base")});
  std::vector<size_t> sizes;
  SolveResult r = solve(s, {}, 0, [&](const Model& m) {
    sizes.push_back(m.size());
  });
  REQUIRE(r.models.size() == 2);
  REQUIRE(sizes.size() == 2);
  CHECK(sizes[0] == r.models[0].first.size());
  CHECK(sizes[1] == r.models[1].first.size());
}

TEST_CASE("assign on defined or unknown atoms has no effect") {
  std::vector<std::string> warnings;
  ControlOptions o;
  o.log = [&](const std::string& w) { warnings.push_back(w); };
  SystemState s = create(kSimple, o);
  ground(s, {part("base")});
  std::string before = state_signature(s);

  assign_external(s, at(s, "p(0)"), TruthValue::True);  // defined
  CHECK(state_signature(s) == before);
  CHECK(warnings.empty());

  assign_external(s, at(s, "zzz"), TruthValue::True);  // never declared
  CHECK(state_signature(s) == before);
  CHECK(warnings.size() == 1);
}

TEST_CASE("release moves the atom to the outputs for good") {
  SystemState s = create(kListing4);
  ground(s, {part("base")});
  Atom e1 = at(s, "e(1)");
  assign_external(s, e1, TruthValue::True);
  release_external(s, e1);
  CHECK(s.assignment.tru.empty());
  CHECK(strs(s, s.module.inputs).empty());
  CHECK(strs(s, s.released) == std::vector<std::string>{"e(1)"});
  CHECK(std::find(s.module.outputs.begin(), s.module.outputs.end(), e1) !=
        s.module.outputs.end());

  // permanently false from now on
  SolveResult r = solve(s, {});
  CHECK(result_sets(s, r) ==
        std::set<std::set<std::string>>{{"f(1)", "f(2)", "b(1)", "b(2)"}});

  // release of defined or unknown atoms is the identity
  std::string before = state_signature(s);
  release_external(s, at(s, "f(1)"));
  CHECK(state_signature(s) == before);
}

TEST_CASE("released atoms are denied both statuses in the future") {
  std::vector<std::string> warnings;
  ControlOptions o;
  o.log = [&](const std::string& w) { warnings.push_back(w); };
  SystemState s = create(kListing4, o);
  ground(s, {part("base")});
  release_external(s, at(s, "e(1)"));

  // a new external declaration is ignored with a warning
  add(s, "#program redecl.\n#external e(1).\nc :- e(1).\n");
  ground(s, {part("redecl")});
  CHECK(strs(s, s.module.inputs).empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("released") != std::string::npos);
  assign_external(s, at(s, "e(1)"), TruthValue::True);
  SolveResult r = solve(s, {});
  // e(1) stays false, so c is never derived
  CHECK(result_sets(s, r) ==
        std::set<std::set<std::string>>{{"f(1)", "f(2)", "b(1)", "b(2)"}});

  // a rule head on the released atom is a redefinition
  add(s, "#program redef.\ne(1).\n");
  CHECK_THROWS_AS(ground(s, {part("redef")}), NotCompositionalError);
}

TEST_CASE("the four state identities hold pointwise") {
  SystemState base = create(kListing4, quiet());
  ground(base, {part("base")});

  const TruthValue vals[] = {TruthValue::True, TruthValue::Undef,
                             TruthValue::False};
  for (const char* name : {"e(1)", "f(1)", "zzz"}) {
    SystemState s0 = base;
    Atom a = at(s0, name);

    // 1: release . release = release
    {
      SystemState s1 = s0, s2 = s0;
      release_external(s1, a);
      release_external(s1, a);
      release_external(s2, a);
      CHECK(state_signature(s1) == state_signature(s2));
    }
    for (TruthValue v : vals) {
      // 2: release . assign(v) = release
      {
        SystemState s1 = s0, s2 = s0;
        assign_external(s1, a, v);
        release_external(s1, a);
        release_external(s2, a);
        CHECK(state_signature(s1) == state_signature(s2));
      }
      // 3: assign(v) . release = release
      {
        SystemState s1 = s0, s2 = s0;
        release_external(s1, a);
        assign_external(s1, a, v);
        release_external(s2, a);
        CHECK(state_signature(s1) == state_signature(s2));
      }
      // 4: assign(v) . assign(v') = assign(v)
      for (TruthValue v2 : vals) {
        SystemState s1 = s0, s2 = s0;
        assign_external(s1, a, v2);
        assign_external(s1, a, v);
        assign_external(s2, a, v);
        CHECK(state_signature(s1) == state_signature(s2));
      }
    }
  }
}

TEST_CASE("the identities hold on randomized states") {
  std::mt19937 rng(90125);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  const TruthValue vals[] = {TruthValue::True, TruthValue::Undef,
                             TruthValue::False};
  for (int iter = 0; iter < 100; ++iter) {
    SystemState s = create(kSimple, quiet());
    ground(s, {part("base")});
    int nops = pick(6);
    int next_succ = 1;
    for (int i = 0; i < nops; ++i) {
      switch (pick(4)) {
        case 0:
          if (next_succ <= 3) ground(s, {part("succ", {next_succ++})});
          break;
        case 1:
          assign_external(s, at(s, "p(" + std::to_string(pick(7)) + ")"),
                          vals[pick(3)]);
          break;
        case 2: {
          // avoid atoms a later ground step might define
          const int safe[] = {0, 4, 5, 6};
          release_external(
              s, at(s, "p(" + std::to_string(safe[pick(4)]) + ")"));
          break;
        }
        default:
          solve(s, {});
          break;
      }
    }
    Atom a = at(s, "p(" + std::to_string(pick(7)) + ")");
    TruthValue v = vals[pick(3)], v2 = vals[pick(3)];
    CAPTURE(iter);

    SystemState s1 = s, s2 = s;
    release_external(s1, a);
    release_external(s1, a);
    release_external(s2, a);
    CHECK(state_signature(s1) == state_signature(s2));

    s1 = s; s2 = s;
    assign_external(s1, a, v);
    release_external(s1, a);
    release_external(s2, a);
    CHECK(state_signature(s1) == state_signature(s2));

    s1 = s; s2 = s;
    release_external(s1, a);
    assign_external(s1, a, v);
    release_external(s2, a);
    CHECK(state_signature(s1) == state_signature(s2));

    s1 = s; s2 = s;
    assign_external(s1, a, v2);
    assign_external(s1, a, v);
    assign_external(s2, a, v);
    CHECK(state_signature(s1) == state_signature(s2));
  }
}

TEST_CASE("ground composition matches the module-level reconstruction") {
  // control-level ground must equal instantiate + module_from_grounding +
  // join done by hand, step by step
  SystemState s = create(kSimple);
  Store st;
  Module acc;
  SubprogramTable t = split_subprograms(parse_source(kSimple).stmts);

  auto step = [&](const std::string& name, std::vector<int64_t> args) {
    std::vector<Part> parts = {part(name, args)};
    ground(s, parts);

    std::vector<TermPtr> vals;
    for (int64_t v : args) vals.push_back(Term::mk_int(v));
    std::vector<Statement> stmts =
        substitute(t[name].stmts, t[name].params, vals);
    AtomBase base;
    base.atoms = acc.inputs;
    base.atoms.insert(base.atoms.end(), acc.outputs.begin(),
                      acc.outputs.end());
    sort_atoms(st, base.atoms);
    GroundProgram g = instantiate(st, stmts, base, {});
    acc = join(st, acc, module_from_grounding(st, g, base));

    std::multiset<std::string> want;
    for (const GroundRule& r : acc.rules) want.insert(rule_to_string(st, r));
    CHECK(rule_set(s) == want);
    std::vector<std::string> wi, wo;
    for (Atom a : acc.inputs) wi.push_back(st.atom_to_string(a));
    for (Atom a : acc.outputs) wo.push_back(st.atom_to_string(a));
    std::sort(wi.begin(), wi.end());
    std::sort(wo.begin(), wo.end());
    CHECK(strs(s, s.module.inputs) == wi);
    CHECK(strs(s, s.module.outputs) == wo);
  };

  step("base", {});
  step("succ", {1});
  step("succ", {2});
  step("succ", {3});
}

TEST_CASE("module fields track unions of per-step programs and externals") {
  // after any ground sequence: outputs = union of heads, inputs = union of
  // declared externals minus heads
  SystemState s = create(kSimple);
  std::set<std::string> heads, externals;

  auto record = [&](const std::vector<Part>& parts) {
    // reconstruct this step's (P_i, E_i) against the pre-state base
    SubprogramTable t = split_subprograms(parse_source(kSimple).stmts);
    std::vector<Statement> stmts;
    for (const Part& p : parts) {
      auto sub = substitute(t[p.name].stmts, t[p.name].params, p.args);
      stmts.insert(stmts.end(), sub.begin(), sub.end());
    }
    AtomBase base;
    base.atoms = s.module.inputs;
    base.atoms.insert(base.atoms.end(), s.module.outputs.begin(),
                      s.module.outputs.end());
    sort_atoms(s.store, base.atoms);
    GroundProgram g = instantiate(s.store, stmts, base, {});
    for (const GroundRule& r : g.rules)
      if (r.kind != GroundRule::Kind::Constraint)
        heads.insert(s.store.atom_to_string(r.head));
    for (Atom e : g.externals) externals.insert(s.store.atom_to_string(e));

    ground(s, parts);
    std::set<std::string> want_inputs;
    for (const std::string& e : externals)
      if (!heads.count(e)) want_inputs.insert(e);
    std::vector<std::string> gi = strs(s, s.module.inputs);
    std::vector<std::string> go = strs(s, s.module.outputs);
    CHECK(std::set<std::string>(gi.begin(), gi.end()) == want_inputs);
    CHECK(std::set<std::string>(go.begin(), go.end()) == heads);
  };

  record({part("base")});
  record({part("succ", {1}), part("succ", {2})});
  record({part("succ", {3})});
}

TEST_CASE("cleanup preserves the solve results") {
  SystemState s = create(kSimple);
  ground(s, {part("base")});
  ground(s, {part("succ", {1})});
  release_external(s, at(s, "p(4)"));
  assign_external(s, at(s, "p(3)"), TruthValue::Undef);

  SolveResult before = solve(s, {});
  cleanup(s);
  SolveResult after = solve(s, {});
  CHECK(result_sets(s, before) == result_sets(s, after));
  CHECK(strs(s, s.cleaned) == std::vector<std::string>{"p(4)"});

  // grounding after cleanup no longer sees the released atom
  add(s, "#program probe.\nr :- not p(4).\n");
  ground(s, {part("probe")});
  CHECK(rule_set(s).count("r.") == 1);
  SolveResult r2 = solve(s, {});
  for (const auto& m : result_sets(s, r2)) CHECK(m.count("r") == 1);
}

TEST_CASE("replaying an operation sequence reproduces the results") {
  auto run = [](std::vector<std::set<std::set<std::string>>>& out) {
    SystemState s = create(kSimple);
    ground(s, {part("base")});
    assign_external(s, at(s, "p(3)"), TruthValue::True);
    out.push_back(result_sets(s, solve(s, {})));
    assign_external(s, at(s, "p(3)"), TruthValue::Undef);
    out.push_back(result_sets(s, solve(s, {})));
    ground(s, {part("succ", {1}), part("succ", {2})});
    release_external(s, at(s, "p(3)"));
    out.push_back(result_sets(s, solve(s, {})));
  };
  std::vector<std::set<std::set<std::string>>> a, b;
  run(a);
  run(b);
  CHECK(a == b);
}

TEST_CASE("constants from the options are substituted before grounding") {
  ControlOptions o;
  o.consts.emplace_back("n", parse_term_text("2"));
  SystemState s = create("q(n).\nr(X) :- q(X), X > 1.\n", o);
  ground(s, {part("base")});
  CHECK(rule_set(s) == std::multiset<std::string>{"q(2).", "r(2) :- q(2)."});
}

TEST_CASE("trace records one line per operation") {
  std::vector<std::string> lines;
  ControlOptions o;
  o.trace = [&](const std::string& l) { lines.push_back(l); };
  SystemState s = create(kSimple, o);
  ground(s, {part("base")});
  assign_external(s, at(s, "p(3)"), TruthValue::True);
  solve(s, {});
  ground(s, {part("succ", {1}), part("succ", {2})});
  release_external(s, at(s, "p(3)"));
  cleanup(s);
  CHECK(lines == std::vector<std::string>{
                     "create()",
                     "ground((base,()))",
                     "assignExternal(p(3),t)",
                     "solve(({},{}))",
                     "ground((succ,(1)),(succ,(2)))",
                     "releaseExternal(p(3))",
                     "cleanup()",
                 });
}

TEST_CASE("lax composition downgrades cross-module loops to warnings") {
  std::vector<std::string> warnings;
  ControlOptions o;
  o.log = [&](const std::string& w) { warnings.push_back(w); };
  o.lax_composition = true;
  const char* text =
      "#external b.\na :- b.\nc :- not a.\n#program two.\nb :- a.\n";
  SystemState strict_state = create(text);
  ground(strict_state, {part("base")});
  CHECK_THROWS_AS(ground(strict_state, {part("two")}), NotCompositionalError);

  SystemState s = create(text, o);
  ground(s, {part("base")});
  ground(s, {part("two")});
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("loop") != std::string::npos);
  SolveResult r = solve(s, {});
  CHECK(result_sets(s, r) == std::set<std::set<std::string>>{{"c"}});
}

TEST_CASE("minimize elements accumulate and gate on externals") {
  SystemState s = create(
      "#external gate.\n{ x }.\npay :- x, gate.\n#minimize{ 1@1 : pay }.\n");
  ground(s, {part("base")});
  // gate defaults to false: both choices cost 0, so both survive
  SolveResult r = solve(s, {});
  CHECK(r.models.size() == 2);
  assign_external(s, at(s, "gate"), TruthValue::True);
  SolveResult r2 = solve(s, {});
  CHECK(result_sets(s, r2) == std::set<std::set<std::string>>{{"gate"}});
}

TEST_CASE("shown atoms honor show declarations") {
  SystemState s = create("#show q/1.\nq(1). r(2).\n");
  ground(s, {part("base")});
  SolveResult r = solve(s, {});
  REQUIRE(r.models.size() == 1);
  CHECK(strs(s, shown_atoms(s, r.models[0].first)) ==
        std::vector<std::string>{"q(1)"});

  // without declarations everything non-auxiliary is shown
  SystemState s2 = create("q(1). r(2).\n");
  ground(s2, {part("base")});
  SolveResult r2 = solve(s2, {});
  REQUIRE(r2.models.size() == 1);
  CHECK(strs(s2, shown_atoms(s2, r2.models[0].first)) ==
        std::vector<std::string>{"q(1)", "r(2)"});
}
