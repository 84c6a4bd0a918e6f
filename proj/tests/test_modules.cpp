#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mshot/module.hpp"
#include "mshot/solver.hpp"

using namespace mshot;

namespace {

Atom mk(Store& st, const std::string& name) { return st.atom(st.sym(name), {}); }

GroundRule normal(Store& st, Atom head, std::vector<Atom> pos,
                  std::vector<Atom> neg = {}) {
  sort_atoms(st, pos);
  sort_atoms(st, neg);
  return GroundRule{GroundRule::Kind::Normal, head, std::move(pos),
                    std::move(neg)};
}

GroundRule constraint(Store& st, std::vector<Atom> pos,
                      std::vector<Atom> neg = {}) {
  sort_atoms(st, pos);
  sort_atoms(st, neg);
  return GroundRule{GroundRule::Kind::Constraint, kNoAtom, std::move(pos),
                    std::move(neg)};
}

std::vector<std::string> strs(const Store& st, std::vector<Atom> v) {
  std::vector<std::string> out;
  for (Atom a : v) out.push_back(st.atom_to_string(a));
  std::sort(out.begin(), out.end());
  return out;
}

std::multiset<std::string> rule_set(const Store& st,
                                    const std::vector<GroundRule>& rules) {
  std::multiset<std::string> out;
  for (const GroundRule& r : rules) out.insert(rule_to_string(st, r));
  return out;
}

std::set<std::set<std::string>> as_sets(const Store& st,
                                        const std::vector<Model>& models) {
  std::set<std::set<std::string>> out;
  for (const Model& m : models) {
    std::set<std::string> s;
    for (Atom a : m) s.insert(st.atom_to_string(a));
    out.insert(s);
  }
  return out;
}

Module ground_module(Store& st, const std::string& text,
                     const AtomBase& base = {}) {
  SubprogramTable t = split_subprograms(parse_source(text).stmts);
  GroundProgram g = instantiate(st, t["base"].stmts, base, {});
  return module_from_grounding(st, g, base);
}

// grounds one instantiation of a single-parameter subprogram against the
// accumulated module's atom base and joins it on
Module ground_step(Store& st, const std::string& text, const std::string& name,
                   int64_t k, const Module& acc) {
  SubprogramTable t = split_subprograms(parse_source(text).stmts);
  std::vector<Statement> stmts =
      substitute(t[name].stmts, t[name].params, {Term::mk_int(k)});
  AtomBase base;
  base.atoms = acc.inputs;
  base.atoms.insert(base.atoms.end(), acc.outputs.begin(), acc.outputs.end());
  sort_atoms(st, base.atoms);
  GroundProgram g = instantiate(st, stmts, base, {});
  return join(st, acc, module_from_grounding(st, g, base));
}

const char* kListing4 =
    "f(1). f(2).\n#external e(X) : f(X), X < 2.\n"
    "a(X) :- f(X), e(X).\nb(X) :- f(X), not e(X).\n";

const char* kChain =
    "#program s(i).\n#external a(i).\n{ q(i) }.\n"
    "a(i-1) :- q(i).\na(i-1) :- a(i).\n:- a(i), q(i).\n";

const char* kExactlyOne =
    "#program step(i).\n#external a(i).\n{ q(i) }.\n"
    "a(i-1) :- q(i), i > 1.\na(i-1) :- a(i), i > 1.\n:- a(i), q(i).\n"
    ":- not a(1), not q(1), i = 1.\n";

}  // namespace

TEST_CASE("module from an empty grounding returns the base as inputs") {
  Store st;
  AtomBase base;
  base.atoms = {mk(st, "x"), mk(st, "y")};
  sort_atoms(st, base.atoms);
  Module m = module_from_grounding(st, GroundProgram{}, base);
  CHECK(m.rules.empty());
  CHECK(strs(st, m.inputs) == std::vector<std::string>{"x", "y"});
  CHECK(m.outputs.empty());
}

TEST_CASE("externals program yields module with input e(1)") {
  Store st;
  Module m = ground_module(st, kListing4);
  CHECK(rule_set(st, m.rules) ==
        std::multiset<std::string>{"a(1) :- e(1), f(1).",
                                   "b(1) :- f(1), not e(1).", "b(2) :- f(2).",
                                   "f(1).", "f(2)."});
  CHECK(strs(st, m.inputs) == std::vector<std::string>{"e(1)"});
  CHECK(strs(st, m.outputs) ==
        std::vector<std::string>{"a(1)", "b(1)", "b(2)", "f(1)", "f(2)"});
}

TEST_CASE("declared externals overridden by rules go to outputs") {
  Store st;
  Module m = ground_module(st, "a.\n#external a.\n");
  CHECK(strs(st, m.inputs).empty());
  CHECK(strs(st, m.outputs) == std::vector<std::string>{"a"});
}

TEST_CASE("compositional example from the background section") {
  Store st;
  Atom a = mk(st, "a"), b = mk(st, "b"), c = mk(st, "c");
  Module m1;  // ({a <- ~c; c <- ~b}, {b}, {a,c})
  m1.rules = {normal(st, a, {}, {c}), normal(st, c, {}, {b})};
  m1.inputs = {b};
  m1.outputs = {a, c};
  sort_atoms(st, m1.outputs);
  Module m2;  // ({b <- a}, {a}, {b})
  m2.rules = {normal(st, b, {a})};
  m2.inputs = {a};
  m2.outputs = {b};

  CHECK(as_sets(st, module_stable_models(st, m1)) ==
        std::set<std::set<std::string>>{{"a", "b"}, {"c"}});
  CHECK(as_sets(st, module_stable_models(st, m2)) ==
        std::set<std::set<std::string>>{{"a", "b"}, {}});

  CHECK(check_compositional(st, m1, m2).ok);
  Module j = join(st, m1, m2);
  CHECK(j.inputs.empty());
  CHECK(strs(st, j.outputs) == std::vector<std::string>{"a", "b", "c"});
  CHECK(j.rules.size() == 3);
  CHECK(as_sets(st, module_stable_models(st, j)) ==
        std::set<std::set<std::string>>{{"a", "b"}, {"c"}});
}

TEST_CASE("cross-module positive recursion is flagged with its scc") {
  Store st;
  Atom a = mk(st, "a"), b = mk(st, "b"), c = mk(st, "c");
  Module m1;  // ({a <- b; c <- ~a}, {b}, {a,c})
  m1.rules = {normal(st, a, {b}), normal(st, c, {}, {a})};
  m1.inputs = {b};
  m1.outputs = {a, c};
  sort_atoms(st, m1.outputs);
  Module m2;  // ({b <- a}, {a}, {b})
  m2.rules = {normal(st, b, {a})};
  m2.inputs = {a};
  m2.outputs = {b};

  // {a,b} is stable for each module alone but not for the union
  CHECK(as_sets(st, module_stable_models(st, m1)).count({"a", "b"}) == 1);
  CHECK(as_sets(st, module_stable_models(st, m2)).count({"a", "b"}) == 1);

  CompositionalityReport rep = check_compositional(st, m1, m2);
  REQUIRE(!rep.ok);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].kind == CompositionViolation::Kind::CrossModuleScc);
  CHECK(strs(st, rep.violations[0].witness) ==
        std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(join(st, m1, m2), NotCompositionalError);

  // lax mode skips the recursion check but the union loses {a,b}
  Module j = join(st, m1, m2, true);
  CHECK(as_sets(st, module_stable_models(st, j)) ==
        std::set<std::set<std::string>>{{"c"}});
}

TEST_CASE("output overlap is rejected even in lax mode") {
  Store st;
  Atom a = mk(st, "a");
  Module m1, m2;
  m1.rules = {normal(st, a, {})};
  m1.outputs = {a};
  m2.rules = {normal(st, a, {})};
  m2.outputs = {a};
  CompositionalityReport rep = check_compositional(st, m1, m2);
  REQUIRE(!rep.ok);
  CHECK(rep.violations[0].kind == CompositionViolation::Kind::OutputOverlap);
  CHECK(strs(st, rep.violations[0].witness) == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(join(st, m1, m2, true), NotCompositionalError);
}

TEST_CASE("join with the empty module is the identity") {
  Store st;
  Module m = ground_module(st, kListing4);
  Module j = join(st, m, Module{});
  CHECK(rule_set(st, j.rules) == rule_set(st, m.rules));
  CHECK(j.inputs == m.inputs);
  CHECK(j.outputs == m.outputs);
}

TEST_CASE("join consumes inputs defined by the other side") {
  Store st;
  Atom a = mk(st, "a"), b = mk(st, "b");
  Module m1;  // ({a <- b}, {b}, {a})
  m1.rules = {normal(st, a, {b})};
  m1.inputs = {b};
  m1.outputs = {a};
  Module m2;  // ({b <-}, {}, {b})
  m2.rules = {normal(st, b, {})};
  m2.outputs = {b};
  Module j = join(st, m1, m2);
  CHECK(j.inputs.empty());
  CHECK(strs(st, j.outputs) == std::vector<std::string>{"a", "b"});
  Module j2 = join(st, m2, m1);
  CHECK(j2.inputs == j.inputs);
  CHECK(j2.outputs == j.outputs);
  CHECK(rule_set(st, j2.rules) == rule_set(st, j.rules));
}

TEST_CASE("sccs of the positive dependency graph") {
  Store st;
  Atom a = mk(st, "a"), b = mk(st, "b"), c = mk(st, "c");
  std::vector<GroundRule> cyc = {normal(st, a, {b}), normal(st, b, {a})};
  std::vector<std::vector<Atom>> comps = sccs(cyc);
  REQUIRE(comps.size() == 1);
  CHECK(strs(st, comps[0]) == std::vector<std::string>{"a", "b"});

  std::vector<GroundRule> chain = {normal(st, a, {b}), normal(st, b, {c})};
  comps = sccs(chain);
  CHECK(comps.size() == 3);
  for (const auto& comp : comps) CHECK(comp.size() == 1);

  // negation does not merge components
  std::vector<GroundRule> neg = {normal(st, a, {}, {b}), normal(st, b, {}, {a})};
  CHECK(sccs(neg).size() == 2);
}

TEST_CASE("chain module matches the worked example") {
  Store st;
  SubprogramTable t = split_subprograms(parse_source(kChain).stmts);
  std::vector<Statement> s1 =
      substitute(t["s"].stmts, t["s"].params, {Term::mk_int(1)});
  GroundProgram g = instantiate(st, s1, {}, {});
  Module m = module_from_grounding(st, g, {});
  CHECK(rule_set(st, m.rules) ==
        std::multiset<std::string>{"a(0) :- q(1).", "a(0) :- a(1).",
                                   ":- a(1), q(1).", "{q(1)}."});
  CHECK(strs(st, m.inputs) == std::vector<std::string>{"a(1)"});
  CHECK(strs(st, m.outputs) == std::vector<std::string>{"a(0)", "q(1)"});
}

TEST_CASE("joined chain has i+1 stable models under the false default") {
  Store st;
  Module acc;
  for (int k = 1; k <= 4; ++k) acc = ground_step(st, kChain, "s", k, acc);
  CHECK(strs(st, acc.inputs) == std::vector<std::string>{"a(4)"});
  CHECK(strs(st, acc.outputs) ==
        std::vector<std::string>{"a(0)", "a(1)", "a(2)", "a(3)", "q(1)",
                                 "q(2)", "q(3)", "q(4)"});
  SolveProgram p;
  p.rules = acc.rules;
  p.inputs = acc.inputs;
  SolveResult r = enumerate_stable(st, p, {}, {});
  std::set<std::set<std::string>> got;
  for (const auto& [m, c] : r.models) {
    std::set<std::string> s;
    for (Atom a : m) s.insert(st.atom_to_string(a));
    got.insert(s);
  }
  std::set<std::set<std::string>> want = {
      {},
      {"a(0)", "q(1)"},
      {"a(0)", "a(1)", "q(2)"},
      {"a(0)", "a(1)", "a(2)", "q(3)"},
      {"a(0)", "a(1)", "a(2)", "a(3)", "q(4)"},
  };
  CHECK(got == want);
}

TEST_CASE("exactly-one chain drops the empty model") {
  Store st;
  SubprogramTable t = split_subprograms(parse_source(kExactlyOne).stmts);
  std::vector<Statement> s1 =
      substitute(t["step"].stmts, t["step"].params, {Term::mk_int(1)});
  GroundProgram g = instantiate(st, s1, {}, {});
  Module m1 = module_from_grounding(st, g, {});
  // lines 4 and 5 produce no ground rule for step 1
  CHECK(rule_set(st, m1.rules) ==
        std::multiset<std::string>{"{q(1)}.", ":- a(1), q(1).",
                                   ":- not a(1), not q(1)."});
  CHECK(strs(st, m1.inputs) == std::vector<std::string>{"a(1)"});
  CHECK(strs(st, m1.outputs) == std::vector<std::string>{"q(1)"});

  Store st2;
  Module acc;
  for (int k = 1; k <= 4; ++k)
    acc = ground_step(st2, kExactlyOne, "step", k, acc);
  SolveProgram p;
  p.rules = acc.rules;
  p.inputs = acc.inputs;
  SolveResult r = enumerate_stable(st2, p, {}, {});
  std::set<std::set<std::string>> got;
  for (const auto& [m, c] : r.models) {
    std::set<std::string> s;
    for (Atom a : m) s.insert(st2.atom_to_string(a));
    got.insert(s);
  }
  std::set<std::set<std::string>> want = {
      {"q(1)"},
      {"a(1)", "q(2)"},
      {"a(1)", "a(2)", "q(3)"},
      {"a(1)", "a(2)", "a(3)", "q(4)"},
  };
  CHECK(got == want);
}

TEST_CASE("module theorem holds on random compositional pairs") {
  Store st;
  std::vector<Atom> uni;
  for (const char* n : {"a", "b", "c", "d", "e", "f"}) uni.push_back(mk(st, n));
  std::mt19937 rng(77);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };

  int tested = 0;
  for (int iter = 0; iter < 400 && tested < 100; ++iter) {
    // split outputs, build sparse rules over the universe
    std::vector<Atom> oa, ob;
    for (Atom x : uni) {
      int r = pick(3);
      if (r == 0) oa.push_back(x);
      else if (r == 1) ob.push_back(x);
    }
    if (oa.empty() || ob.empty()) continue;
    auto build = [&](const std::vector<Atom>& outs) {
      Module m;
      m.outputs = outs;
      std::set<Atom> used;
      int nrules = 1 + pick(4);
      for (int i = 0; i < nrules; ++i) {
        std::vector<Atom> pos, neg;
        int nb = pick(3);
        for (int j = 0; j < nb; ++j) {
          Atom x = uni[pick(static_cast<int>(uni.size()))];
          (pick(2) ? pos : neg).push_back(x);
          used.insert(x);
        }
        if (pick(5) == 0) {
          m.rules.push_back(constraint(st, pos, neg));
        } else {
          Atom h = outs[pick(static_cast<int>(outs.size()))];
          m.rules.push_back(normal(st, h, pos, neg));
        }
      }
      std::set<Atom> oset(outs.begin(), outs.end());
      for (Atom x : used)
        if (!oset.count(x)) m.inputs.push_back(x);
      sort_atoms(st, m.inputs);
      sort_atoms(st, m.outputs);
      return m;
    };
    Module ma = build(oa), mb = build(ob);
    if (!check_compositional(st, ma, mb).ok) continue;
    ++tested;

    std::vector<Model> xa = module_stable_models(st, ma);
    std::vector<Model> xb = module_stable_models(st, mb);
    Module j = join(st, ma, mb);
    std::set<std::set<std::string>> want;
    std::vector<Atom> scope_a = ma.inputs, scope_b = mb.inputs;
    scope_a.insert(scope_a.end(), ma.outputs.begin(), ma.outputs.end());
    scope_b.insert(scope_b.end(), mb.outputs.begin(), mb.outputs.end());
    std::set<Atom> sa(scope_a.begin(), scope_a.end());
    std::set<Atom> sb(scope_b.begin(), scope_b.end());
    for (const Model& x1 : xa)
      for (const Model& x2 : xb) {
        std::set<Atom> x1_in_b, x2_in_a;
        for (Atom x : x1)
          if (sb.count(x)) x1_in_b.insert(x);
        for (Atom x : x2)
          if (sa.count(x)) x2_in_a.insert(x);
        if (x1_in_b != x2_in_a) continue;
        std::set<std::string> u;
        for (Atom x : x1) u.insert(st.atom_to_string(x));
        for (Atom x : x2) u.insert(st.atom_to_string(x));
        want.insert(u);
      }
    CHECK(as_sets(st, module_stable_models(st, j)) == want);
  }
  CHECK(tested == 100);
}
