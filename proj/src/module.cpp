#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mshot/module.hpp"

namespace mshot {

namespace {

std::vector<Atom> rule_heads(const std::vector<GroundRule>& rules) {
  std::vector<Atom> h;
  for (const GroundRule& r : rules)
    if (r.head != kNoAtom) h.push_back(r.head);
  return h;
}

std::vector<GroundRule> dedupe_rules(const std::vector<GroundRule>& a,
                                     const std::vector<GroundRule>& b) {
  std::vector<GroundRule> out = a;
  for (const GroundRule& r : b)
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  return out;
}

}  // namespace

Module module_from_grounding(const Store& st, const GroundProgram& g,
                             const AtomBase& base) {
  Module m;
  m.rules = g.rules;
  m.outputs = rule_heads(g.rules);
  sort_atoms(st, m.outputs);
  std::set<Atom> heads(m.outputs.begin(), m.outputs.end());
  std::set<Atom> in(base.atoms.begin(), base.atoms.end());
  in.insert(g.externals.begin(), g.externals.end());
  for (Atom a : heads) in.erase(a);
  m.inputs.assign(in.begin(), in.end());
  sort_atoms(st, m.inputs);
  return m;
}

std::vector<std::vector<Atom>> sccs(const std::vector<GroundRule>& rules) {
  // positive dependency graph: head -> positive body atoms
  std::map<Atom, int> id_of;
  std::vector<Atom> atom_of;
  auto node = [&](Atom a) {
    auto it = id_of.find(a);
    if (it != id_of.end()) return it->second;
    int id = static_cast<int>(atom_of.size());
    id_of[a] = id;
    atom_of.push_back(a);
    return id;
  };
  std::vector<std::vector<int>> edges;
  auto grow = [&] { edges.resize(atom_of.size()); };
  for (const GroundRule& r : rules) {
    for (Atom a : r.pos) node(a);
    for (Atom a : r.neg) node(a);
    if (r.head == kNoAtom) continue;
    int u = node(r.head);
    grow();
    for (Atom a : r.pos) {
      int v = node(a);
      grow();
      edges[u].push_back(v);
    }
  }
  grow();

  size_t n = atom_of.size();
  std::vector<int> low(n), num(n, -1), stk;
  std::vector<bool> on(n, false);
  int counter = 0;
  std::vector<std::vector<Atom>> out;
  for (size_t root = 0; root < n; ++root) {
    if (num[root] != -1) continue;
    std::vector<std::pair<int, size_t>> frames{{static_cast<int>(root), 0}};
    while (!frames.empty()) {
      auto& [u, ei] = frames.back();
      if (ei == 0) {
        num[u] = low[u] = counter++;
        stk.push_back(u);
        on[u] = true;
      }
      if (ei < edges[u].size()) {
        int v = edges[u][ei++];
        if (num[v] == -1)
          frames.emplace_back(v, 0);
        else if (on[v])
          low[u] = std::min(low[u], num[v]);
        continue;
      }
      if (low[u] == num[u]) {
        std::vector<Atom> comp;
        for (;;) {
          int w = stk.back();
          stk.pop_back();
          on[w] = false;
          comp.push_back(atom_of[static_cast<size_t>(w)]);
          if (w == u) break;
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
      int uu = u;
      frames.pop_back();
      if (!frames.empty())
        low[frames.back().first] = std::min(low[frames.back().first], low[uu]);
    }
  }
  return out;
}

CompositionalityReport check_compositional(const Store& st, const Module& a,
                                           const Module& b) {
  CompositionalityReport rep;
  std::vector<Atom> overlap;
  {
    std::set<Atom> oa(a.outputs.begin(), a.outputs.end());
    for (Atom x : b.outputs)
      if (oa.count(x)) overlap.push_back(x);
  }
  if (!overlap.empty()) {
    sort_atoms(st, overlap);
    rep.ok = false;
    rep.violations.push_back(
        {CompositionViolation::Kind::OutputOverlap, std::move(overlap)});
  }

  std::set<Atom> oa(a.outputs.begin(), a.outputs.end());
  std::set<Atom> ob(b.outputs.begin(), b.outputs.end());
  auto joint = dedupe_rules(a.rules, b.rules);
  for (auto& comp : sccs(joint)) {
    if (comp.size() < 2) continue;
    bool ia = false, ib = false;
    for (Atom x : comp) {
      ia |= oa.count(x) > 0;
      ib |= ob.count(x) > 0;
    }
    if (ia && ib) {
      std::vector<Atom> w = comp;
      sort_atoms(st, w);
      rep.ok = false;
      rep.violations.push_back(
          {CompositionViolation::Kind::CrossModuleScc, std::move(w)});
    }
  }
  return rep;
}

Module join(const Store& st, const Module& a, const Module& b, bool lax) {
  CompositionalityReport rep = check_compositional(st, a, b);
  if (!rep.ok) {
    bool fatal = false;
    std::string msg = "modules are not compositional:";
    for (const auto& v : rep.violations) {
      bool overlap = v.kind == CompositionViolation::Kind::OutputOverlap;
      if (overlap || !lax) fatal = true;
      msg += overlap ? " redefined atoms {" : " cross-module positive loop {";
      for (size_t i = 0; i < v.witness.size(); ++i) {
        if (i) msg += ", ";
        msg += st.atom_to_string(v.witness[i]);
      }
      msg += "}";
    }
    if (fatal) throw NotCompositionalError(msg, std::move(rep));
  }
  Module m;
  m.rules = dedupe_rules(a.rules, b.rules);
  std::set<Atom> oa(a.outputs.begin(), a.outputs.end());
  std::set<Atom> ob(b.outputs.begin(), b.outputs.end());
  std::set<Atom> in;
  for (Atom x : a.inputs)
    if (!ob.count(x)) in.insert(x);
  for (Atom x : b.inputs)
    if (!oa.count(x)) in.insert(x);
  m.inputs.assign(in.begin(), in.end());
  sort_atoms(st, m.inputs);
  std::set<Atom> out(oa.begin(), oa.end());
  out.insert(ob.begin(), ob.end());
  m.outputs.assign(out.begin(), out.end());
  sort_atoms(st, m.outputs);
  return m;
}

}  // namespace mshot
