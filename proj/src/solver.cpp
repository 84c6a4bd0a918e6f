#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mshot/solver.hpp"

namespace mshot {

int cmp_cost(const CostVector& a, const CostVector& b) {
  auto ia = a.weights.rbegin(), ib = b.weights.rbegin();
  while (ia != a.weights.rend() || ib != b.weights.rend()) {
    int64_t wa = 0, wb = 0;
    if (ib == b.weights.rend() ||
        (ia != a.weights.rend() && ia->first > ib->first)) {
      wa = (ia++)->second;
    } else if (ia == a.weights.rend() ||
               (ib != b.weights.rend() && ib->first > ia->first)) {
      wb = (ib++)->second;
    } else {
      wa = (ia++)->second;
      wb = (ib++)->second;
    }
    if (wa != wb) return wa < wb ? -1 : 1;
  }
  return 0;
}

DesugarResult desugar_choices(Store& st, const std::vector<GroundRule>& rules) {
  DesugarResult d;
  Sym caux = st.sym("__c");
  int64_t k = 0;
  for (const GroundRule& r : rules) {
    if (r.kind != GroundRule::Kind::Choice) {
      d.rules.push_back(r);
      continue;
    }
    Atom ax = st.atom(caux, {st.g_int(k++)});
    GroundRule r1;
    r1.kind = GroundRule::Kind::Normal;
    r1.head = r.head;
    r1.pos = r.pos;
    r1.neg = r.neg;
    r1.neg.push_back(ax);
    sort_atoms(st, r1.neg);
    GroundRule r2;
    r2.kind = GroundRule::Kind::Normal;
    r2.head = ax;
    r2.pos = r.pos;
    r2.neg = r.neg;
    r2.neg.push_back(r.head);
    sort_atoms(st, r2.neg);
    d.rules.push_back(std::move(r1));
    d.rules.push_back(std::move(r2));
    d.choices.push_back({r.head, ax, r.pos, r.neg});
  }
  return d;
}

Model extend_choice_aux(const DesugarResult& d, const Model& x) {
  std::unordered_set<Atom> xs(x.begin(), x.end());
  Model out = x;
  std::set<Atom> added;
  for (const ChoiceAux& c : d.choices) {
    if (xs.count(c.head)) continue;
    bool body = true;
    for (Atom a : c.pos)
      if (!xs.count(a)) body = false;
    for (Atom a : c.neg)
      if (xs.count(a)) body = false;
    if (body) added.insert(c.aux);
  }
  out.insert(out.end(), added.begin(), added.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<GroundRule> reduct(const std::vector<GroundRule>& rules,
                               const Model& x) {
  std::unordered_set<Atom> xs(x.begin(), x.end());
  std::vector<GroundRule> out;
  for (const GroundRule& r : rules) {
    if (r.kind == GroundRule::Kind::Choice)
      throw Error("reduct expects choice-free rules");
    bool blocked = false;
    for (Atom a : r.neg)
      if (xs.count(a)) blocked = true;
    if (blocked) continue;
    GroundRule n = r;
    n.neg.clear();
    out.push_back(std::move(n));
  }
  return out;
}

Model minimal_model(const std::vector<GroundRule>& rules) {
  std::unordered_map<Atom, std::vector<size_t>> occ;
  std::vector<size_t> need(rules.size(), 0);
  std::vector<Atom> queue;
  std::unordered_set<Atom> derived;
  auto fire = [&](Atom h) {
    if (derived.insert(h).second) queue.push_back(h);
  };
  for (size_t i = 0; i < rules.size(); ++i) {
    const GroundRule& r = rules[i];
    if (r.kind == GroundRule::Kind::Choice)
      throw Error("minimal_model expects choice-free rules");
    if (!r.neg.empty()) throw Error("minimal_model expects a positive program");
    if (r.kind == GroundRule::Kind::Constraint) continue;
    std::vector<Atom> pos = r.pos;
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    need[i] = pos.size();
    if (pos.empty()) {
      fire(r.head);
      continue;
    }
    for (Atom a : pos) occ[a].push_back(i);
  }
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    auto it = occ.find(queue[qi]);
    if (it == occ.end()) continue;
    for (size_t i : it->second)
      if (--need[i] == 0) fire(rules[i].head);
  }
  Model m(derived.begin(), derived.end());
  std::sort(m.begin(), m.end());
  return m;
}

bool is_stable(const std::vector<GroundRule>& rules, const Model& x) {
  std::unordered_set<Atom> xs(x.begin(), x.end());
  for (const GroundRule& r : rules) {
    if (r.kind != GroundRule::Kind::Constraint) continue;
    bool applies = true;
    for (Atom a : r.pos)
      if (!xs.count(a)) applies = false;
    if (applies)
      for (Atom a : r.neg)
        if (xs.count(a)) applies = false;
    if (applies) return false;
  }
  Model mm = minimal_model(reduct(rules, x));
  Model xc = x;
  std::sort(xc.begin(), xc.end());
  xc.erase(std::unique(xc.begin(), xc.end()), xc.end());
  return mm == xc;
}

namespace {

// completion-based engine: unit propagation over the Clark completion with
// chronological backtracking; every full assignment is verified stable
struct Engine {
  std::unordered_map<Atom, int> var_of;
  std::vector<Atom> atom_of;  // kNoAtom marks body variables
  std::vector<int8_t> val;    // -1 unassigned, 0 false, 1 true
  std::vector<int32_t> pool;
  struct Cl {
    int32_t begin, size;
  };
  std::vector<Cl> clauses;
  std::vector<std::vector<int32_t>> watches;  // per literal
  std::vector<int32_t> units;
  bool contradiction = false;
  std::vector<int32_t> trail;
  size_t qhead = 0;

  int avar(Atom a) {
    auto it = var_of.find(a);
    if (it != var_of.end()) return it->second;
    int v = new_var();
    var_of.emplace(a, v);
    atom_of[static_cast<size_t>(v)] = a;
    return v;
  }
  int new_var() {
    int v = static_cast<int>(atom_of.size());
    atom_of.push_back(kNoAtom);
    val.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    return v;
  }
  bool has_var(Atom a) const { return var_of.count(a) > 0; }

  static int32_t plit(int v) { return v << 1; }
  static int32_t nlit(int v) { return (v << 1) | 1; }

  int8_t lit_val(int32_t l) const {
    int8_t v = val[static_cast<size_t>(l >> 1)];
    if (v < 0) return -1;
    return (l & 1) ? static_cast<int8_t>(1 - v) : v;
  }

  void add_clause(std::vector<int32_t> ls) {
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    for (size_t i = 0; i + 1 < ls.size(); ++i)
      if ((ls[i] ^ 1) == ls[i + 1]) return;  // tautology
    if (ls.empty()) {
      contradiction = true;
      return;
    }
    if (ls.size() == 1) {
      units.push_back(ls[0]);
      return;
    }
    int32_t id = static_cast<int32_t>(clauses.size());
    clauses.push_back({static_cast<int32_t>(pool.size()),
                       static_cast<int32_t>(ls.size())});
    pool.insert(pool.end(), ls.begin(), ls.end());
    watches[static_cast<size_t>(ls[0])].push_back(id);
    watches[static_cast<size_t>(ls[1])].push_back(id);
  }

  bool assign(int32_t l) {
    size_t v = static_cast<size_t>(l >> 1);
    int8_t want = (l & 1) ? 0 : 1;
    if (val[v] >= 0) return val[v] == want;
    val[v] = want;
    trail.push_back(l);
    return true;
  }

  bool propagate() {
    while (qhead < trail.size()) {
      int32_t fl = trail[qhead++] ^ 1;  // literal that became false
      auto& ws = watches[static_cast<size_t>(fl)];
      size_t i = 0, j = 0;
      bool conflict = false;
      for (; i < ws.size(); ++i) {
        int32_t ci = ws[i];
        Cl c = clauses[static_cast<size_t>(ci)];
        int32_t* ls = &pool[static_cast<size_t>(c.begin)];
        if (ls[0] == fl) std::swap(ls[0], ls[1]);
        if (lit_val(ls[0]) == 1) {
          ws[j++] = ci;
          continue;
        }
        int32_t k = -1;
        for (int32_t t = 2; t < c.size; ++t)
          if (lit_val(ls[t]) != 0) {
            k = t;
            break;
          }
        if (k >= 0) {
          std::swap(ls[1], ls[k]);
          watches[static_cast<size_t>(ls[1])].push_back(ci);
          continue;
        }
        ws[j++] = ci;
        if (!assign(ls[0])) {
          ++i;
          conflict = true;
          break;
        }
      }
      while (i < ws.size()) ws[j++] = ws[i++];
      ws.resize(j);
      if (conflict) return false;
    }
    return true;
  }

  void undo_to(size_t sz) {
    while (trail.size() > sz) {
      val[static_cast<size_t>(trail.back() >> 1)] = -1;
      trail.pop_back();
    }
    qhead = sz;
  }
};

struct Search {
  Engine eng;
  std::vector<int> branch;
  std::vector<GroundRule> program;  // desugared, for the stability check
  std::set<Atom> solver_aux;        // fresh __c atoms, stripped from models

  // builds clauses for the Clark completion of `rules`
  void build(const std::vector<GroundRule>& rules) {
    program = rules;
    std::vector<Atom> def_order;
    std::unordered_map<Atom, std::vector<const GroundRule*>> defs;
    for (const GroundRule& r : rules) {
      for (Atom a : r.pos) eng.avar(a);
      for (Atom a : r.neg) eng.avar(a);
      if (r.kind == GroundRule::Kind::Constraint) continue;
      eng.avar(r.head);
      auto [it, fresh] = defs.try_emplace(r.head);
      if (fresh) def_order.push_back(r.head);
      it->second.push_back(&r);
    }
    for (Atom h : def_order) {
      auto& rs = defs[h];
      int hv = eng.avar(h);
      bool fact = false;
      for (const GroundRule* r : rs)
        if (r->pos.empty() && r->neg.empty()) fact = true;
      if (fact) {
        eng.add_clause({Engine::plit(hv)});
        continue;
      }
      std::vector<int32_t> body_lits;
      for (const GroundRule* r : rs) {
        std::vector<int32_t> lits;
        for (Atom a : r->pos) lits.push_back(Engine::plit(eng.avar(a)));
        for (Atom a : r->neg) lits.push_back(Engine::nlit(eng.avar(a)));
        int32_t bl;
        if (lits.size() == 1) {
          bl = lits[0];
        } else {
          int bv = eng.new_var();
          bl = Engine::plit(bv);
          std::vector<int32_t> big{bl};
          for (int32_t l : lits) {
            eng.add_clause({bl ^ 1, l});
            big.push_back(l ^ 1);
          }
          eng.add_clause(std::move(big));
        }
        eng.add_clause({static_cast<int32_t>(bl ^ 1), Engine::plit(hv)});
        body_lits.push_back(bl);
      }
      std::vector<int32_t> supp{Engine::nlit(hv)};
      supp.insert(supp.end(), body_lits.begin(), body_lits.end());
      eng.add_clause(std::move(supp));
    }
    for (const GroundRule& r : rules) {
      if (r.kind != GroundRule::Kind::Constraint) continue;
      std::vector<int32_t> cl;
      for (Atom a : r.pos) cl.push_back(Engine::nlit(eng.avar(a)));
      for (Atom a : r.neg) cl.push_back(Engine::plit(eng.avar(a)));
      eng.add_clause(std::move(cl));
    }
    // atoms without any rule are false
    for (size_t v = 0; v < eng.atom_of.size(); ++v) {
      Atom a = eng.atom_of[v];
      if (a != kNoAtom && !defs.count(a))
        eng.add_clause({Engine::nlit(static_cast<int>(v))});
    }
  }

  // branch over choice heads first (in rule order), then everything else
  // in canonical atom order
  void order_branches(const Store& st, const std::vector<ChoiceAux>& choices) {
    std::set<int> listed;
    for (const ChoiceAux& c : choices) {
      int v = eng.avar(c.head);
      if (listed.insert(v).second) branch.push_back(v);
    }
    std::vector<int> rest;
    for (size_t v = 0; v < eng.atom_of.size(); ++v)
      if (eng.atom_of[v] != kNoAtom &&
          !listed.count(static_cast<int>(v)))
        rest.push_back(static_cast<int>(v));
    std::sort(rest.begin(), rest.end(), [&](int a, int b) {
      return st.cmp_atom(eng.atom_of[static_cast<size_t>(a)],
                         eng.atom_of[static_cast<size_t>(b)]) < 0;
    });
    branch.insert(branch.end(), rest.begin(), rest.end());
  }

  // runs the search; on_model returns false to stop enumeration
  // returns true when the space was exhausted
  bool run(const std::function<bool(const Model&)>& on_model) {
    if (eng.contradiction) return true;
    for (int32_t u : eng.units)
      if (!eng.assign(u)) return true;
    if (!eng.propagate()) return true;

    struct Decision {
      int var;
      size_t trail_sz, scan;
      bool flipped;
    };
    std::vector<Decision> ds;
    size_t scan = 0;

    auto backtrack = [&]() -> bool {
      while (!ds.empty()) {
        Decision& dd = ds.back();
        if (!dd.flipped) {
          eng.undo_to(dd.trail_sz);
          dd.flipped = true;
          scan = dd.scan;
          if (eng.assign(Engine::nlit(dd.var)) && eng.propagate()) return true;
        }
        ds.pop_back();
      }
      return false;
    };

    for (;;) {
      while (scan < branch.size() &&
             eng.val[static_cast<size_t>(branch[scan])] >= 0)
        ++scan;
      if (scan == branch.size()) {
        Model xfull;
        for (size_t v = 0; v < eng.atom_of.size(); ++v)
          if (eng.atom_of[v] != kNoAtom && eng.val[v] == 1)
            xfull.push_back(eng.atom_of[v]);
        std::sort(xfull.begin(), xfull.end());
        if (is_stable(program, xfull)) {
          Model onatoms;
          for (Atom a : xfull)
            if (!solver_aux.count(a)) onatoms.push_back(a);
          if (!on_model(onatoms)) return false;
        }
        if (!backtrack()) return true;
      } else {
        int v = branch[scan];
        ds.push_back({v, eng.trail.size(), scan, false});
        eng.assign(Engine::plit(v));
        if (!eng.propagate())
          if (!backtrack()) return true;
      }
    }
  }
};

// effective assignment restricted to the inputs
void effective_v(const SolveProgram& p, const ExternalAssignment& v,
                 std::set<Atom>& vt, std::set<Atom>& vu) {
  std::unordered_set<Atom> in(p.inputs.begin(), p.inputs.end());
  for (Atom x : v.tru)
    if (in.count(x)) vt.insert(x);
  for (Atom x : v.undef)
    if (in.count(x) && !vt.count(x)) vu.insert(x);
}

Search make_search(Store& st, const std::vector<GroundRule>& rules,
                   const std::set<Atom>& vt, const std::set<Atom>& vu) {
  std::vector<GroundRule> all = rules;
  for (Atom x : vt) {
    GroundRule r;
    r.kind = GroundRule::Kind::Normal;
    r.head = x;
    all.push_back(std::move(r));
  }
  for (Atom x : vu) {
    GroundRule r;
    r.kind = GroundRule::Kind::Choice;
    r.head = x;
    all.push_back(std::move(r));
  }
  DesugarResult d = desugar_choices(st, all);
  Search s;
  for (const ChoiceAux& c : d.choices) s.solver_aux.insert(c.aux);
  s.build(d.rules);
  s.order_branches(st, d.choices);
  return s;
}

}  // namespace

SolveResult enumerate_stable(Store& st, const SolveProgram& p,
                             const ExternalAssignment& v, const Assumptions& a,
                             int64_t limit, const Logger& log) {
  std::set<Atom> vt, vu;
  effective_v(p, v, vt, vu);
  Search s = make_search(st, p.rules, vt, vu);

  auto warn = [&](const std::string& m) {
    if (log) log(m);
    else std::fprintf(stderr, "warning: %s\n", m.c_str());
  };
  // declared inputs without a solver variable are known but constantly false
  std::unordered_set<Atom> declared(p.inputs.begin(), p.inputs.end());
  bool impossible = false;
  for (Atom x : a.must_true) {
    if (s.eng.has_var(x)) {
      s.eng.units.push_back(Engine::plit(s.eng.avar(x)));
    } else {
      if (!declared.count(x))
        warn("assumption over unknown atom " + st.atom_to_string(x) +
             "; no model can satisfy it");
      impossible = true;
    }
  }
  for (Atom x : a.must_false) {
    if (s.eng.has_var(x)) {
      s.eng.units.push_back(Engine::nlit(s.eng.avar(x)));
    } else if (!declared.count(x)) {
      warn("assumption over unknown atom " + st.atom_to_string(x) +
           "; trivially false");
    }
  }

  SolveResult res;
  if (impossible) return res;
  res.exhausted = s.run([&](const Model& m) {
    res.models.emplace_back(m, cost(st, m, p.minimize));
    return limit == 0 ||
           static_cast<int64_t>(res.models.size()) < limit;
  });
  if (!res.models.empty()) res.status = SolveStatus::Sat;
  return res;
}

std::vector<Model> brute_force_stable(Store& st,
                                      const std::vector<GroundRule>& rules,
                                      const std::vector<Atom>& inputs,
                                      const ExternalAssignment& v) {
  SolveProgram p;
  p.rules = rules;
  p.inputs = inputs;
  std::set<Atom> vt, vu;
  effective_v(p, v, vt, vu);

  std::vector<GroundRule> all = rules;
  for (Atom x : vt) {
    GroundRule r;
    r.kind = GroundRule::Kind::Normal;
    r.head = x;
    all.push_back(std::move(r));
  }
  for (Atom x : vu) {
    GroundRule r;
    r.kind = GroundRule::Kind::Choice;
    r.head = x;
    all.push_back(std::move(r));
  }
  DesugarResult d = desugar_choices(st, all);

  std::set<Atom> cand;
  for (const GroundRule& r : rules)
    if (r.head != kNoAtom) cand.insert(r.head);
  cand.insert(vu.begin(), vu.end());
  for (Atom x : vt) cand.erase(x);
  if (cand.size() > 24) throw Error("brute-force oracle limited to 24 atoms");

  std::vector<Atom> free(cand.begin(), cand.end());
  std::vector<Model> out;
  for (uint64_t mask = 0; mask < (1ull << free.size()); ++mask) {
    Model x(vt.begin(), vt.end());
    for (size_t i = 0; i < free.size(); ++i)
      if (mask & (1ull << i)) x.push_back(free[i]);
    std::sort(x.begin(), x.end());
    Model ext = extend_choice_aux(d, x);
    if (is_stable(d.rules, ext)) out.push_back(std::move(x));
  }
  std::sort(out.begin(), out.end());
  return out;
}

CostVector cost(const Store&, const Model& x,
                const std::vector<MinElem>& elems) {
  CostVector c;
  std::unordered_set<Atom> xs(x.begin(), x.end());
  std::set<std::string> seen;
  for (const MinElem& e : elems) {
    c.weights.emplace(e.priority, 0);
    bool sat = true;
    for (Atom a : e.pos)
      if (!xs.count(a)) sat = false;
    if (sat)
      for (Atom a : e.neg)
        if (xs.count(a)) sat = false;
    if (!sat) continue;
    std::string key = std::to_string(e.weight) + "@" +
                      std::to_string(e.priority);
    for (GTerm t : e.tuple) key += "," + std::to_string(t);
    if (seen.insert(key).second) c.weights[e.priority] += e.weight;
  }
  return c;
}

SolveResult optimize(Store& st, const SolveProgram& p,
                     const ExternalAssignment& v, const Assumptions& a,
                     const Logger& log) {
  SolveResult all = enumerate_stable(st, p, v, a, 0, log);
  SolveResult res;
  res.exhausted = all.exhausted;
  for (auto& mc : all.models) {
    if (res.models.empty()) {
      res.models.push_back(std::move(mc));
      continue;
    }
    int c = cmp_cost(mc.second, res.models.front().second);
    if (c < 0) {
      res.models.clear();
      res.models.push_back(std::move(mc));
    } else if (c == 0) {
      res.models.push_back(std::move(mc));
    }
  }
  if (!res.models.empty()) res.status = SolveStatus::Sat;
  return res;
}

std::vector<Model> module_stable_models(Store& st, const Module& m) {
  SolveProgram p;
  p.rules = m.rules;
  p.inputs = m.inputs;
  ExternalAssignment v;
  v.undef = m.inputs;
  SolveResult r = enumerate_stable(st, p, v, {}, 0);
  std::vector<Model> out;
  for (auto& mc : r.models) out.push_back(std::move(mc.first));
  return out;
}

}  // namespace mshot
