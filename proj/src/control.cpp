#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "mshot/control.hpp"
#include "mshot/ground.hpp"

namespace mshot {

namespace {

void warn(const SystemState& s, const std::string& m) {
  if (s.opts.log) s.opts.log(m);
  else std::fprintf(stderr, "warning: %s\n", m.c_str());
}

void trace(const SystemState& s, const std::string& line) {
  if (s.opts.trace) s.opts.trace(line);
}

std::string atom_set_str(const Store& st, std::vector<Atom> as) {
  std::sort(as.begin(), as.end(),
            [&](Atom a, Atom b) { return st.cmp_atom(a, b) < 0; });
  std::string out = "{";
  for (size_t i = 0; i < as.size(); ++i) {
    if (i) out += ",";
    out += st.atom_to_string(as[i]);
  }
  return out + "}";
}

// ground argument term -> display text (single-valued by precondition)
std::string arg_str(Store& st, const TermPtr& t) {
  std::vector<GTerm> vs = eval_term(st, t);
  if (vs.size() != 1) throw Error("subprogram argument is not ground");
  return st.term_to_string(vs[0]);
}

bool contains_id(const std::vector<Atom>& sorted_by_id, Atom a) {
  return std::binary_search(sorted_by_id.begin(), sorted_by_id.end(), a);
}

void insert_id(std::vector<Atom>& sorted_by_id, Atom a) {
  auto it = std::lower_bound(sorted_by_id.begin(), sorted_by_id.end(), a);
  if (it == sorted_by_id.end() || *it != a) sorted_by_id.insert(it, a);
}

void erase_id(std::vector<Atom>& sorted_by_id, Atom a) {
  auto it = std::lower_bound(sorted_by_id.begin(), sorted_by_id.end(), a);
  if (it != sorted_by_id.end() && *it == a) sorted_by_id.erase(it);
}

}  // namespace

SystemState create(const std::string& text, const ControlOptions& opts) {
  SystemState s;
  s.opts = opts;
  ParseResult pr = parse_source(text);
  s.subprograms = split_subprograms(pr.stmts);
  s.incmode = pr.incmode;
  trace(s, "create()");
  return s;
}

void add(SystemState& s, const std::string& text) {
  ParseResult pr = parse_source(text);
  merge_subprograms(s.subprograms, split_subprograms(pr.stmts));
  s.incmode = s.incmode || pr.incmode;
}

Atom intern_atom(SystemState& s, const AstAtom& a) {
  std::vector<GTerm> args;
  for (const TermPtr& t : a.args) {
    std::vector<GTerm> vs = eval_term(s.store, t);
    if (vs.size() != 1) throw Error("atom '" + a.pred + "' is not ground");
    args.push_back(vs[0]);
  }
  return s.store.atom(s.store.sym(a.pred), args);
}

void ground(SystemState& s, const std::vector<Part>& parts) {
  // trace + dedupe of repeated (name, args) pairs
  std::vector<std::pair<std::string, const Part*>> uniq;
  {
    std::set<std::string> seen;
    std::string tr = "ground(";
    bool first = true;
    for (const Part& p : parts) {
      std::string key = "(" + p.name + ",(";
      for (size_t i = 0; i < p.args.size(); ++i) {
        if (i) key += ",";
        key += arg_str(s.store, p.args[i]);
      }
      key += "))";
      if (!first) tr += ",";
      first = false;
      tr += key;
      if (seen.insert(key).second) uniq.emplace_back(key, &p);
    }
    trace(s, tr + ")");
  }

  // substitute and collect: the parts form one joint program
  std::vector<Statement> stmts;
  for (auto& [key, p] : uniq) {
    auto it = s.subprograms.find(p->name);
    if (it == s.subprograms.end())
      throw Error("unknown subprogram '" + p->name + "'");
    const Subprogram& sp = it->second;
    if (sp.params.size() != p->args.size())
      throw Error("subprogram '" + p->name + "' expects " +
                  std::to_string(sp.params.size()) + " argument(s), got " +
                  std::to_string(p->args.size()));
    std::vector<Statement> part = substitute(sp.stmts, sp.params, p->args);
    for (auto& [cname, cval] : s.opts.consts)
      part = substitute(part, {cname}, {cval});
    for (Statement& st : part) stmts.push_back(std::move(st));
  }

  // atom base: everything the module mentions, minus cleaned-up atoms
  AtomBase base;
  base.atoms.reserve(s.module.inputs.size() + s.module.outputs.size());
  base.atoms.insert(base.atoms.end(), s.module.inputs.begin(),
                    s.module.inputs.end());
  base.atoms.insert(base.atoms.end(), s.module.outputs.begin(),
                    s.module.outputs.end());
  std::sort(base.atoms.begin(), base.atoms.end());
  std::unordered_set<Atom> gone(s.cleaned.begin(), s.cleaned.end());
  std::erase_if(base.atoms, [&](Atom a) { return gone.count(a) > 0; });
  base.facts = s.fact_atoms;

  GroundOptions go;
  go.max_instances = s.opts.max_instances;
  go.simplify_facts = s.opts.simplify_facts;
  go.log = s.opts.log;
  go.aux_start = s.aux_counter;
  go.aux_next = &s.aux_counter;
  GroundProgram g = instantiate(s.store, stmts, base, go);

  // released atoms are denied external status for good
  if (!s.released.empty()) {
    std::vector<Atom> kept;
    for (Atom e : g.externals) {
      if (contains_id(s.released, e))
        warn(s, "external declaration for released atom " +
                    s.store.atom_to_string(e) + " ignored");
      else kept.push_back(e);
    }
    g.externals = std::move(kept);
  }

  Module part = module_from_grounding(s.store, g, base);
  if (s.opts.lax_composition) {
    CompositionalityReport rep = check_compositional(s.store, s.module, part);
    for (const CompositionViolation& v : rep.violations)
      if (v.kind == CompositionViolation::Kind::CrossModuleScc)
        warn(s, "cross-module positive loop " +
                    atom_set_str(s.store, v.witness));
  }
  s.module = join(s.store, s.module, part, s.opts.lax_composition);

  // V keeps its values on surviving inputs; new inputs default to false
  std::unordered_set<Atom> in(s.module.inputs.begin(), s.module.inputs.end());
  std::erase_if(s.assignment.tru, [&](Atom a) { return !in.count(a); });
  std::erase_if(s.assignment.undef, [&](Atom a) { return !in.count(a); });

  s.minimize_elems.insert(s.minimize_elems.end(), g.minimize.begin(),
                          g.minimize.end());
  for (const ShowSig& sh : g.shows)
    if (std::find(s.show_decls.begin(), s.show_decls.end(), sh) ==
        s.show_decls.end())
      s.show_decls.push_back(sh);
}

void assign_external(SystemState& s, Atom a, TruthValue v) {
  const char* vs = v == TruthValue::True ? "t"
                   : v == TruthValue::Undef ? "u"
                                            : "f";
  trace(s, "assignExternal(" + s.store.atom_to_string(a) + "," + vs + ")");
  if (std::find(s.module.inputs.begin(), s.module.inputs.end(), a) ==
      s.module.inputs.end()) {
    if (std::find(s.module.outputs.begin(), s.module.outputs.end(), a) ==
        s.module.outputs.end())
      warn(s, "assignExternal: unknown atom " + s.store.atom_to_string(a) +
                  "; no effect");
    return;
  }
  switch (v) {
    case TruthValue::True:
      insert_id(s.assignment.tru, a);
      erase_id(s.assignment.undef, a);
      break;
    case TruthValue::Undef:
      insert_id(s.assignment.undef, a);
      erase_id(s.assignment.tru, a);
      break;
    case TruthValue::False:
      erase_id(s.assignment.tru, a);
      erase_id(s.assignment.undef, a);
      break;
  }
}

void release_external(SystemState& s, Atom a) {
  trace(s, "releaseExternal(" + s.store.atom_to_string(a) + ")");
  auto it = std::find(s.module.inputs.begin(), s.module.inputs.end(), a);
  if (it == s.module.inputs.end()) {
    if (std::find(s.module.outputs.begin(), s.module.outputs.end(), a) ==
        s.module.outputs.end())
      warn(s, "releaseExternal: unknown atom " + s.store.atom_to_string(a) +
                  "; no effect");
    return;
  }
  s.module.inputs.erase(it);
  s.module.outputs.push_back(a);
  std::sort(s.module.outputs.begin(), s.module.outputs.end(),
            [&](Atom x, Atom y) { return s.store.cmp_atom(x, y) < 0; });
  erase_id(s.assignment.tru, a);
  erase_id(s.assignment.undef, a);
  insert_id(s.released, a);
}

SolveResult solve(SystemState& s, const Assumptions& a, int64_t limit,
                  const ModelCallback& on_model) {
  trace(s, "solve((" + atom_set_str(s.store, a.must_true) + "," +
               atom_set_str(s.store, a.must_false) + "))");
  SolveProgram p;
  p.rules = s.module.rules;
  p.inputs = s.module.inputs;
  p.minimize = s.minimize_elems;
  SolveResult r;
  if (p.minimize.empty()) {
    r = enumerate_stable(s.store, p, s.assignment, a, limit, s.opts.log);
  } else {
    r = optimize(s.store, p, s.assignment, a, s.opts.log);
    if (limit > 0 && static_cast<int64_t>(r.models.size()) > limit)
      r.models.resize(static_cast<size_t>(limit));
  }
  if (on_model)
    for (const auto& [m, c] : r.models) on_model(m);
  return r;
}

void cleanup(SystemState& s) {
  trace(s, "cleanup()");
  std::unordered_set<Atom> heads;
  for (const GroundRule& r : s.module.rules)
    if (r.kind != GroundRule::Kind::Constraint) heads.insert(r.head);
  for (Atom o : s.module.outputs)
    if (!heads.count(o)) insert_id(s.cleaned, o);

  // atoms certainly true: closure of the negation-free normal rules
  std::vector<GroundRule> pos;
  for (const GroundRule& r : s.module.rules)
    if (r.kind == GroundRule::Kind::Normal && r.neg.empty()) pos.push_back(r);
  s.fact_atoms = minimal_model(pos);
}

std::vector<Atom> shown_atoms(const SystemState& s, const Model& m) {
  std::vector<Atom> out;
  for (Atom a : m) {
    const std::string& pred = s.store.sym_str(s.store.atom_pred(a));
    if (pred.rfind("__", 0) == 0) continue;
    if (s.show_decls.empty()) {
      out.push_back(a);
      continue;
    }
    ShowSig sig{s.store.atom_pred(a),
                static_cast<int>(s.store.atom_arity(a))};
    if (std::find(s.show_decls.begin(), s.show_decls.end(), sig) !=
        s.show_decls.end())
      out.push_back(a);
  }
  std::sort(out.begin(), out.end(),
            [&](Atom a, Atom b) { return s.store.cmp_atom(a, b) < 0; });
  return out;
}

std::string state_signature(const SystemState& s) {
  std::string out = "R{";
  for (const auto& [name, sp] : s.subprograms) {
    out += name + "(";
    for (size_t i = 0; i < sp.params.size(); ++i) {
      if (i) out += ",";
      out += sp.params[i];
    }
    out += "):";
    for (const Statement& st : sp.stmts) out += " " + render(st);
    out += ";";
  }
  out += "} P{";
  for (const GroundRule& r : s.module.rules)
    out += rule_to_string(s.store, r) + " ";
  out += "} I" + atom_set_str(s.store, s.module.inputs);
  out += " O" + atom_set_str(s.store, s.module.outputs);
  out += " Vt" + atom_set_str(s.store, s.assignment.tru);
  out += " Vu" + atom_set_str(s.store, s.assignment.undef);
  out += " released" + atom_set_str(s.store, s.released);
  return out;
}

}  // namespace mshot
