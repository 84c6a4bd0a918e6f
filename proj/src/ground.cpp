#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mshot/ground.hpp"

namespace mshot {

namespace {

constexpr GTerm kUnbound = UINT32_MAX;

uint64_t pred_key(Sym name, size_t arity) {
  return (static_cast<uint64_t>(name) << 20) | static_cast<uint64_t>(arity);
}

// --- compiled terms ----------------------------------------------------------

struct CTerm {
  TermKind kind;
  int64_t num = 0;
  Sym name = 0;
  char op = 0;
  int var = -1;
  GTerm cached = kUnbound;  // Int/Const leaf, interned at compile time
  bool pure = true;         // only Var/Func/Int/Const nodes below
  std::vector<CTerm> args;
  std::vector<int> vars;  // all var slots below, deduped
};

struct VarMap {
  std::map<std::string, int> ids;
  int slot(const std::string& n) {
    auto it = ids.find(n);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(ids.size());
    ids.emplace(n, id);
    return id;
  }
};

CTerm compile_term(Store& st, const TermPtr& t, VarMap& vm) {
  CTerm c;
  c.kind = t->kind;
  switch (t->kind) {
    case TermKind::Int:
      c.num = t->num;
      c.cached = st.g_int(t->num);
      break;
    case TermKind::Const:
      c.name = st.sym(t->name);
      c.cached = st.g_const(c.name);
      break;
    case TermKind::Var:
      c.var = vm.slot(t->name);
      c.vars.push_back(c.var);
      break;
    case TermKind::Func:
      c.name = st.sym(t->name);
      [[fallthrough]];
    default:
      c.op = t->op;
      for (const auto& a : t->args) {
        c.args.push_back(compile_term(st, a, vm));
        c.pure &= c.args.back().pure;
        for (int v : c.args.back().vars)
          if (std::find(c.vars.begin(), c.vars.end(), v) == c.vars.end())
            c.vars.push_back(v);
      }
      if (t->kind != TermKind::Func) c.pure = false;
      break;
  }
  return c;
}

struct LitC {
  Sym pred = 0;
  uint32_t arity = 0;
  uint64_t key = 0;
  std::vector<CTerm> args;
};

LitC compile_atom(Store& st, const AstAtom& a, VarMap& vm) {
  LitC l;
  l.pred = st.sym(a.pred);
  l.arity = static_cast<uint32_t>(a.args.size());
  l.key = pred_key(l.pred, l.arity);
  for (const auto& t : a.args) l.args.push_back(compile_term(st, t, vm));
  return l;
}

struct CmpC {
  CmpOp op;
  CTerm l, r;
  std::vector<int> vars;
};

struct PlanStep {
  enum class Kind : uint8_t { Match, Cmp } kind;
  int idx;                   // literal / comparison index
  bool drive = false;        // iterate the delta range
  bool delta_filter = false; // match full, require the atom to be in delta
};
using Plan = std::vector<PlanStep>;

struct CondBlock {  // condition of a choice/aggregate element
  std::vector<LitC> pos, negs;
  std::vector<CmpC> cmps;
  Plan plan;
};

struct CElem {
  Sym pred;
  std::vector<CTerm> args;
  CondBlock cond;
};

struct AElem {
  std::vector<CTerm> tuple;
  CondBlock cond;
};

struct AggC {
  CmpOp op;
  CTerm bound;
  std::vector<AElem> elems;
};

struct CStmt {
  Statement::Kind kind;
  int nvars = 0;
  std::vector<LitC> pos, negs;
  std::vector<CmpC> cmps;
  std::vector<AggC> aggs;
  Sym head_pred = 0;
  std::vector<CTerm> head_args;          // Rule/External
  std::optional<CTerm> lb, ub;           // Choice
  std::vector<CElem> elems;              // Choice
  CTerm weight, prio;                    // Minimize
  std::vector<CTerm> tuple;              // Minimize
  std::vector<uint64_t> definer_keys;    // pred keys this statement defines
  std::set<int> global_bound;            // slots bound by outer positive lits
  std::vector<int> drivers;              // outer pos lits with in-comp preds
  bool rerun_full = false;               // element conds depend on own comp
  std::map<int, Plan> plans;             // by driver (-1 = full)
};

// vars a pure pattern binds, in left-to-right match order
void pattern_binds(const CTerm& t, std::set<int>& bound) {
  if (t.kind == TermKind::Var) {
    bound.insert(t.var);
  } else if (t.kind == TermKind::Func) {
    for (const auto& a : t.args) pattern_binds(a, bound);
  }
}

// whether this literal can be matched left-to-right given `bound`,
// and if so which variables it adds
bool lit_eligible(const LitC& l, const std::set<int>& bound,
                  std::set<int>* adds) {
  std::set<int> b = bound;
  // walk args in match order
  struct W {
    static bool walk(const CTerm& t, std::set<int>& b) {
      switch (t.kind) {
        case TermKind::Var:
          b.insert(t.var);
          return true;
        case TermKind::Func:
          for (const auto& a : t.args)
            if (!walk(a, b)) return false;
          return true;
        case TermKind::Int:
        case TermKind::Const:
          return true;
        default:  // arithmetic / interval / pool: evaluated, needs all vars
          for (int v : t.vars)
            if (!b.count(v)) return false;
          return true;
      }
    }
  };
  for (const auto& a : l.args)
    if (!W::walk(a, b)) return false;
  if (adds) *adds = std::move(b);
  return true;
}

Plan build_plan(const std::vector<LitC>& pos, const std::vector<CmpC>& cmps,
                const std::set<int>& bound0, int driver) {
  Plan plan;
  std::set<int> bound = bound0;
  std::vector<bool> done_pos(pos.size(), false);
  std::vector<bool> done_cmp(cmps.size(), false);
  bool driver_pending = driver >= 0;

  auto flush_cmps = [&] {
    for (size_t i = 0; i < cmps.size(); ++i) {
      if (done_cmp[i]) continue;
      bool ready = true;
      for (int v : cmps[i].vars)
        if (!bound.count(v)) ready = false;
      if (ready) {
        plan.push_back({PlanStep::Kind::Cmp, static_cast<int>(i)});
        done_cmp[i] = true;
      }
    }
  };

  // if the driver can run first, it leads the plan
  if (driver_pending) {
    std::set<int> adds;
    if (lit_eligible(pos[driver], bound, &adds)) {
      PlanStep s{PlanStep::Kind::Match, driver};
      s.drive = true;
      plan.push_back(s);
      done_pos[driver] = true;
      bound = std::move(adds);
      driver_pending = false;
    }
  }
  flush_cmps();
  for (;;) {
    int best = -1, best_score = -1;
    for (size_t i = 0; i < pos.size(); ++i) {
      if (done_pos[i]) continue;
      std::set<int> adds;
      if (!lit_eligible(pos[i], bound, &adds)) continue;
      // prefer literals with more already-determined arguments
      int score = 0;
      for (const auto& a : pos[i].args) {
        bool det = true;
        for (int v : a.vars)
          if (!bound.count(v)) det = false;
        score += det ? 1 : 0;
      }
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    PlanStep s{PlanStep::Kind::Match, best};
    if (driver_pending && best == driver) {
      s.delta_filter = true;
      driver_pending = false;
    }
    plan.push_back(s);
    std::set<int> adds;
    lit_eligible(pos[best], bound, &adds);
    bound = std::move(adds);
    done_pos[best] = true;
    flush_cmps();
  }
  for (bool d : done_pos)
    if (!d) throw GroundError("cannot order rule body for instantiation");
  for (bool d : done_cmp)
    if (!d) throw GroundError("comparison over unbound variables");
  return plan;
}

CondBlock compile_cond(Store& st, const std::vector<Literal>& lits, VarMap& vm) {
  CondBlock c;
  for (const Literal& l : lits) {
    if (l.kind == Literal::Kind::Cmp) {
      CmpC cc;
      cc.op = l.cmp.op;
      cc.l = compile_term(st, l.cmp.lhs, vm);
      cc.r = compile_term(st, l.cmp.rhs, vm);
      cc.vars = cc.l.vars;
      for (int v : cc.r.vars)
        if (std::find(cc.vars.begin(), cc.vars.end(), v) == cc.vars.end())
          cc.vars.push_back(v);
      c.cmps.push_back(std::move(cc));
    } else if (l.kind == Literal::Kind::Pos) {
      c.pos.push_back(compile_atom(st, l.atom, vm));
    } else {
      c.negs.push_back(compile_atom(st, l.atom, vm));
    }
  }
  return c;
}

// --- the grounding engine -----------------------------------------------------

struct Grounder {
  Store& st;
  const GroundOptions& opts;
  uint64_t gid;

  struct PredData {
    std::vector<Atom> list;
    std::unordered_map<Atom, size_t> pos_of;
    std::map<uint32_t, std::unordered_map<uint64_t, std::vector<Atom>>> idx;
  };
  std::unordered_map<uint64_t, PredData> preds;
  std::unordered_set<Atom> registered;
  std::unordered_set<Atom> facts;

  std::vector<GroundRule> rules;
  std::unordered_set<std::string> rule_keys;
  std::vector<Atom> externals;
  std::unordered_set<Atom> external_set;
  std::vector<MinElem> minimize;
  std::set<std::string> min_keys;
  std::vector<ShowSig> shows;

  size_t instances = 0;
  std::vector<GTerm> slots;
  std::vector<int> trail;

  // current component info
  std::set<uint64_t> comp_defined;
  std::unordered_map<uint64_t, size_t> delta_lo, delta_hi;

  Grounder(Store& s, const GroundOptions& o) : st(s), opts(o), gid(o.aux_start) {}

  void warn(const std::string& msg) {
    if (opts.log)
      opts.log(msg);
    else
      std::fprintf(stderr, "warning: %s\n", msg.c_str());
  }

  void count_instance() {
    if (++instances > opts.max_instances)
      throw GroundError("instantiation limit exceeded (" +
                        std::to_string(opts.max_instances) + " instances)");
  }

  PredData& pred_data(uint64_t key) { return preds[key]; }

  static uint64_t mix(uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }

  uint64_t masked_hash(Atom a, uint32_t mask) const {
    uint64_t h = 1469598103934665603ull;
    const auto& args = st.atom_args(a);
    for (size_t i = 0; i < args.size(); ++i)
      if (mask & (1u << i)) h = mix(h, args[i]);
    return h;
  }

  void add_atom(Atom a, bool fact) {
    if (registered.insert(a).second) {
      auto& pd = pred_data(pred_key(st.atom_pred(a), st.atom_arity(a)));
      pd.pos_of[a] = pd.list.size();
      pd.list.push_back(a);
      for (auto& [mask, buckets] : pd.idx)
        buckets[masked_hash(a, mask)].push_back(a);
    }
    if (fact) facts.insert(a);
  }

  // --- evaluation ---

  void ev(const CTerm& t, std::vector<GTerm>& out) {
    switch (t.kind) {
      case TermKind::Int:
      case TermKind::Const:
        out.push_back(t.cached);
        return;
      case TermKind::Var: {
        GTerm v = slots[t.var];
        if (v == kUnbound) throw GroundError("internal: unbound variable");
        out.push_back(v);
        return;
      }
      case TermKind::Func: {
        std::vector<std::vector<GTerm>> parts(t.args.size());
        for (size_t i = 0; i < t.args.size(); ++i) {
          ev(t.args[i], parts[i]);
          if (parts[i].empty()) return;
        }
        std::vector<GTerm> tuple(t.args.size());
        cartesian(parts, 0, tuple, [&](const std::vector<GTerm>& tp) {
          out.push_back(st.g_func(t.name, tp));
        });
        return;
      }
      case TermKind::BinOp:
      case TermKind::Neg: {
        std::vector<GTerm> ls, rs;
        ev(t.args[0], ls);
        if (t.kind == TermKind::BinOp)
          ev(t.args[1], rs);
        else
          rs.push_back(st.g_int(0));
        for (GTerm l : ls) {
          for (GTerm r : rs) {
            if (st.g_kind(l) != GKind::Int || st.g_kind(r) != GKind::Int) {
              warn("non-integer arithmetic; dropping instance");
              continue;
            }
            int64_t a = st.g_num(l), b = st.g_num(r), v = 0;
            if (t.kind == TermKind::Neg) {
              v = -a;
            } else {
              switch (t.op) {
                case '+': v = a + b; break;
                case '-': v = a - b; break;
                case '*': v = a * b; break;
                case '/':
                case '\\':
                  if (b == 0) {
                    warn("division by zero; dropping instance");
                    continue;
                  }
                  v = t.op == '/' ? a / b : a % b;
                  break;
              }
            }
            out.push_back(st.g_int(v));
          }
        }
        return;
      }
      case TermKind::Interval: {
        std::vector<GTerm> ls, rs;
        ev(t.args[0], ls);
        ev(t.args[1], rs);
        for (GTerm l : ls) {
          for (GTerm r : rs) {
            if (st.g_kind(l) != GKind::Int || st.g_kind(r) != GKind::Int) {
              warn("non-integer interval bound; dropping instance");
              continue;
            }
            int64_t lo = st.g_num(l), hi = st.g_num(r);
            if (hi - lo > 10000000)
              throw GroundError("interval too large");
            for (int64_t v = lo; v <= hi; ++v) out.push_back(st.g_int(v));
          }
        }
        return;
      }
      case TermKind::Pool: {
        for (const auto& a : t.args) ev(a, out);
        return;
      }
    }
  }

  template <typename F>
  static void cartesian(const std::vector<std::vector<GTerm>>& parts, size_t i,
                        std::vector<GTerm>& tuple, F&& f) {
    if (i == parts.size()) {
      f(tuple);
      return;
    }
    for (GTerm v : parts[i]) {
      tuple[i] = v;
      cartesian(parts, i + 1, tuple, f);
    }
  }

  bool cmp_holds(CmpOp op, GTerm a, GTerm b) const {
    int c = st.cmp_term(a, b);
    switch (op) {
      case CmpOp::Eq: return c == 0;
      case CmpOp::Ne: return c != 0;
      case CmpOp::Lt: return c < 0;
      case CmpOp::Le: return c <= 0;
      case CmpOp::Gt: return c > 0;
      case CmpOp::Ge: return c >= 0;
    }
    return false;
  }

  bool eval_cmp(const CmpC& c) {
    std::vector<GTerm> ls, rs;
    ev(c.l, ls);
    ev(c.r, rs);
    for (GTerm l : ls)
      for (GTerm r : rs)
        if (cmp_holds(c.op, l, r)) return true;
    return false;
  }

  // --- matching ---

  bool match(const CTerm& p, GTerm v) {
    switch (p.kind) {
      case TermKind::Var: {
        GTerm s = slots[p.var];
        if (s == kUnbound) {
          slots[p.var] = v;
          trail.push_back(p.var);
          return true;
        }
        return s == v;
      }
      case TermKind::Int:
      case TermKind::Const:
        return p.cached == v;
      case TermKind::Func: {
        if (st.g_kind(v) != GKind::Func || st.g_name(v) != p.name) return false;
        const auto& va = st.g_args(v);
        if (va.size() != p.args.size()) return false;
        for (size_t i = 0; i < p.args.size(); ++i)
          if (!match(p.args[i], va[i])) return false;
        return true;
      }
      case TermKind::Interval: {
        if (st.g_kind(v) != GKind::Int) return false;
        int64_t x = st.g_num(v);
        std::vector<GTerm> ls, rs;
        ev(p.args[0], ls);
        ev(p.args[1], rs);
        for (GTerm l : ls)
          for (GTerm r : rs)
            if (st.g_kind(l) == GKind::Int && st.g_kind(r) == GKind::Int &&
                st.g_num(l) <= x && x <= st.g_num(r))
              return true;
        return false;
      }
      default: {  // arithmetic / pool: evaluate and test membership
        std::vector<GTerm> vals;
        ev(p, vals);
        return std::find(vals.begin(), vals.end(), v) != vals.end();
      }
    }
  }

  bool match_atom(const LitC& l, Atom a) {
    const auto& args = st.atom_args(a);
    size_t t0 = trail.size();
    for (size_t i = 0; i < args.size(); ++i) {
      if (!match(l.args[i], args[i])) {
        unwind(t0);
        return false;
      }
    }
    return true;
  }

  void unwind(size_t t0) {
    while (trail.size() > t0) {
      slots[trail.back()] = kUnbound;
      trail.pop_back();
    }
  }

  // candidate atoms for a positive literal under the current binding
  const std::vector<Atom>* candidates(const LitC& l, uint64_t* hkey) {
    auto& pd = pred_data(l.key);
    uint32_t mask = 0;
    uint64_t h = 1469598103934665603ull;
    if (l.args.size() <= 20) {
      for (size_t i = 0; i < l.args.size(); ++i) {
        const CTerm& a = l.args[i];
        bool ready = true;
        for (int v : a.vars)
          if (slots[v] == kUnbound) ready = false;
        if (!ready) continue;
        if (a.kind == TermKind::Var) {
          mask |= 1u << i;
          h = mix(h, slots[a.var]);
        } else if (a.kind == TermKind::Int || a.kind == TermKind::Const) {
          mask |= 1u << i;
          h = mix(h, a.cached);
        } else if (a.pure || a.kind == TermKind::BinOp ||
                   a.kind == TermKind::Neg) {
          std::vector<GTerm> vals;
          ev(a, vals);
          if (vals.size() == 1) {
            mask |= 1u << i;
            h = mix(h, vals[0]);
          }
        }
      }
    }
    if (!mask) return &pd.list;
    auto it = pd.idx.find(mask);
    if (it == pd.idx.end()) {
      auto& buckets = pd.idx[mask];
      for (Atom a : pd.list) buckets[masked_hash(a, mask)].push_back(a);
      it = pd.idx.find(mask);
    }
    auto bit = it->second.find(h);
    if (bit == it->second.end()) {
      static const std::vector<Atom> empty;
      return &empty;
    }
    *hkey = h;
    return &bit->second;
  }

  // --- statement evaluation ---

  CStmt* cur = nullptr;
  const Plan* cur_plan = nullptr;

  // negative literal policy at instance construction:
  //   over a certpainly-true atom -> the instance is dropped
  //   otherwise -> keep; the final filter erases literals over atoms
  //   that never enter the derivable base
  template <typename F>
  void resolve_negs(const std::vector<LitC>& negs, size_t j,
                    std::vector<Atom>& kept, F&& leaf) {
    if (j == negs.size()) {
      leaf();
      return;
    }
    const LitC& l = negs[j];
    std::vector<std::vector<GTerm>> parts(l.args.size());
    for (size_t i = 0; i < l.args.size(); ++i) {
      ev(l.args[i], parts[i]);
      if (parts[i].empty()) return;
    }
    std::vector<GTerm> tuple(l.args.size());
    cartesian(parts, 0, tuple, [&](const std::vector<GTerm>& tp) {
      Atom a = st.atom(l.pred, tp);
      if (facts.count(a)) return;  // certainly true: drop this instance
      kept.push_back(a);
      resolve_negs(negs, j + 1, kept, leaf);
      kept.pop_back();
    });
  }

  template <typename F>
  void run_cond(CondBlock& c, std::vector<Atom>& pos_acc, F&& leaf) {
    exec_plan(c.plan, 0, c.pos, c.cmps, -1, 0, 0, pos_acc, [&] {
      std::vector<Atom> kept;
      resolve_negs(c.negs, 0, kept, [&] { leaf(kept); });
    });
  }

  template <typename Leaf>
  void exec_plan(const Plan& plan, size_t step, std::vector<LitC>& pos,
                 std::vector<CmpC>& cmps, int driver, size_t dlo, size_t dhi,
                 std::vector<Atom>& pos_acc, Leaf&& leaf) {
    if (step == plan.size()) {
      leaf();
      return;
    }
    const PlanStep& s = plan[step];
    if (s.kind == PlanStep::Kind::Cmp) {
      if (eval_cmp(cmps[s.idx]))
        exec_plan(plan, step + 1, pos, cmps, driver, dlo, dhi, pos_acc, leaf);
      return;
    }
    LitC& l = pos[s.idx];
    auto& pd = pred_data(l.key);
    size_t lo = 0, hi;
    const std::vector<Atom>* cand;
    uint64_t hkey = 0;
    if (s.drive) {
      cand = &pd.list;
      lo = dlo;
      hi = std::min(dhi, pd.list.size());
    } else {
      cand = candidates(l, &hkey);
      hi = cand->size();
    }
    for (size_t i = lo; i < hi; ++i) {
      Atom a = (*cand)[i];
      if (s.delta_filter) {
        size_t p = pd.pos_of[a];
        if (p < dlo || p >= dhi) continue;
      }
      size_t t0 = trail.size();
      if (match_atom(l, a)) {
        pos_acc.push_back(a);
        exec_plan(plan, step + 1, pos, cmps, driver, dlo, dhi, pos_acc, leaf);
        pos_acc.pop_back();
      }
      unwind(t0);
    }
  }

  // --- rule emission ---

  std::string rule_hash_key(const GroundRule& r) {
    std::string k;
    k.reserve(8 + 4 * (r.pos.size() + r.neg.size()));
    k += static_cast<char>(r.kind);
    k.append(reinterpret_cast<const char*>(&r.head), sizeof(r.head));
    for (Atom a : r.pos) k.append(reinterpret_cast<const char*>(&a), sizeof(a));
    k += '\xff';
    for (Atom a : r.neg) k.append(reinterpret_cast<const char*>(&a), sizeof(a));
    return k;
  }

  void emit(GroundRule r) {
    sort_atoms(st, r.pos);
    sort_atoms(st, r.neg);
    auto key = rule_hash_key(r);
    if (!rule_keys.insert(std::move(key)).second) return;
    count_instance();
    rules.push_back(std::move(r));
  }

  void emit_normal(Atom head, std::vector<Atom> pos, std::vector<Atom> neg) {
    GroundRule r;
    r.kind = GroundRule::Kind::Normal;
    r.head = head;
    r.pos = std::move(pos);
    r.neg = std::move(neg);
    emit(std::move(r));
  }

  // sequential counter over indicator atoms; returns row of __ctr(g,m,j)
  // atoms for j in 1..k
  std::vector<Atom> make_counter(std::vector<Atom> inds, size_t k) {
    Sym ctr = st.sym("__ctr");
    size_t m = inds.size();
    uint64_t g = gid++;
    k = std::min(k, m);
    auto ctr_atom = [&](size_t i, size_t j) {
      return st.atom(ctr, {st.g_int(static_cast<int64_t>(g)),
                           st.g_int(static_cast<int64_t>(i)),
                           st.g_int(static_cast<int64_t>(j))});
    };
    for (size_t i = 1; i <= m; ++i) {
      for (size_t j = 1; j <= std::min(i, k); ++j) {
        Atom h = ctr_atom(i, j);
        add_atom(h, false);
        if (j == 1) {
          emit_normal(h, {inds[i - 1]}, {});
          if (i >= 2) emit_normal(h, {ctr_atom(i - 1, 1)}, {});
        } else {
          if (j <= i - 1) emit_normal(h, {ctr_atom(i - 1, j)}, {});
          emit_normal(h, {ctr_atom(i - 1, j - 1), inds[i - 1]}, {});
        }
      }
    }
    std::vector<Atom> row;
    for (size_t j = 1; j <= k; ++j) row.push_back(ctr_atom(m, j));
    return row;
  }

  // aggregate materialization; returns false if the host instance dies,
  // otherwise may append a fresh atom to extra_pos
  bool do_aggregate(AggC& agg, std::vector<Atom>& extra_pos) {
    std::vector<GTerm> bounds;
    ev(agg.bound, bounds);
    if (bounds.size() != 1 || st.g_kind(bounds[0]) != GKind::Int) {
      warn("count aggregate needs a single integer bound; dropping instance");
      return false;
    }
    int64_t b = st.g_num(bounds[0]);

    // element instances: (tuple, cond)
    struct Entry {
      std::vector<GTerm> tuple;
      std::vector<Atom> pos, neg;
    };
    std::vector<Entry> entries;
    std::set<std::string> seen;
    for (AElem& e : agg.elems) {
      std::vector<Atom> cpos;
      run_cond(e.cond, cpos, [&](std::vector<Atom>& kept) {
        std::vector<std::vector<GTerm>> parts(e.tuple.size());
        for (size_t i = 0; i < e.tuple.size(); ++i) {
          ev(e.tuple[i], parts[i]);
          if (parts[i].empty()) return;
        }
        std::vector<GTerm> tp(e.tuple.size());
        cartesian(parts, 0, tp, [&](const std::vector<GTerm>& tuple) {
          Entry en;
          en.tuple = tuple;
          en.pos = cpos;
          en.neg = kept;
          sort_atoms(st, en.pos);
          sort_atoms(st, en.neg);
          std::string k;
          for (GTerm t : en.tuple) k += std::to_string(t) + ",";
          k += ";";
          for (Atom a : en.pos) k += std::to_string(a) + ",";
          k += ";";
          for (Atom a : en.neg) k += std::to_string(a) + ",";
          if (seen.insert(k).second) entries.push_back(std::move(en));
        });
      });
    }

    // group by tuple; unconditional entries make the tuple certain
    std::map<std::vector<GTerm>, std::vector<Entry*>> by_tuple;
    for (Entry& e : entries) by_tuple[e.tuple].push_back(&e);
    int64_t base = 0;
    std::vector<std::pair<std::vector<GTerm>, std::vector<Entry*>>> open;
    for (auto& [tp, es] : by_tuple) {
      bool uncond = false;
      for (Entry* e : es)
        if (e->pos.empty() && e->neg.empty()) uncond = true;
      if (uncond)
        ++base;
      else
        open.emplace_back(tp, es);
    }
    int64_t m = static_cast<int64_t>(open.size());
    int64_t lo = base, hi = base + m;

    auto certain = [&]() -> bool {
      switch (agg.op) {
        case CmpOp::Ge: return lo >= b;
        case CmpOp::Gt: return lo > b;
        case CmpOp::Le: return hi <= b;
        case CmpOp::Lt: return hi < b;
        case CmpOp::Eq: return lo == hi && lo == b;
        case CmpOp::Ne: return b < lo || b > hi;
      }
      return false;
    }();
    auto possible = [&]() -> bool {
      switch (agg.op) {
        case CmpOp::Ge: return hi >= b;
        case CmpOp::Gt: return hi > b;
        case CmpOp::Le: return lo <= b;
        case CmpOp::Lt: return lo < b;
        case CmpOp::Eq: return lo <= b && b <= hi;
        case CmpOp::Ne: return !(lo == hi && lo == b);
      }
      return false;
    }();
    if (certain) return true;
    if (!possible) return false;

    // indicator atoms per open tuple (ordered by tuple)
    Sym indp = st.sym("__ind");
    Sym aggp = st.sym("__agg");
    uint64_t g = gid++;
    std::vector<Atom> inds;
    int64_t k = 0;
    for (auto& [tp, es] : open) {
      Atom ind;
      if (es.size() == 1 && es[0]->pos.size() == 1 && es[0]->neg.empty()) {
        ind = es[0]->pos[0];
      } else {
        ind = st.atom(indp, {st.g_int(static_cast<int64_t>(g)), st.g_int(k)});
        add_atom(ind, false);
        for (Entry* e : es) emit_normal(ind, e->pos, e->neg);
      }
      inds.push_back(ind);
      ++k;
    }

    int64_t bp = b - base;  // bound over the open tuples only
    size_t depth = 0;
    switch (agg.op) {
      case CmpOp::Ge: depth = static_cast<size_t>(bp); break;
      case CmpOp::Gt: depth = static_cast<size_t>(bp + 1); break;
      case CmpOp::Le: depth = static_cast<size_t>(bp + 1); break;
      case CmpOp::Lt: depth = static_cast<size_t>(bp); break;
      case CmpOp::Eq: depth = static_cast<size_t>(std::min(bp + 1, m)); break;
      case CmpOp::Ne: depth = static_cast<size_t>(std::min(bp + 1, m)); break;
    }
    std::vector<Atom> row = make_counter(inds, depth);
    auto ctr_at = [&](int64_t j) { return row[static_cast<size_t>(j - 1)]; };

    Atom res = st.atom(aggp, {st.g_int(static_cast<int64_t>(g))});
    add_atom(res, false);
    switch (agg.op) {
      case CmpOp::Ge: emit_normal(res, {ctr_at(bp)}, {}); break;
      case CmpOp::Gt: emit_normal(res, {ctr_at(bp + 1)}, {}); break;
      case CmpOp::Le: emit_normal(res, {}, {ctr_at(bp + 1)}); break;
      case CmpOp::Lt: emit_normal(res, {}, {ctr_at(bp)}); break;
      case CmpOp::Eq:
        if (bp == 0)
          emit_normal(res, {}, {ctr_at(1)});
        else if (bp == m)
          emit_normal(res, {ctr_at(m)}, {});
        else
          emit_normal(res, {ctr_at(bp)}, {ctr_at(bp + 1)});
        break;
      case CmpOp::Ne:
        if (bp >= 1) emit_normal(res, {}, {ctr_at(bp)});
        if (bp < m) emit_normal(res, {ctr_at(bp + 1)}, {});
        break;
    }
    extra_pos.push_back(res);
    return true;
  }

  // full leaf handling for one outer-body instance of a statement
  void leaf_instance(CStmt& cs, std::vector<Atom>& body_pos) {
    // aggregates first: they extend the positive body or kill the instance
    std::vector<Atom> extra;
    for (AggC& agg : cs.aggs)
      if (!do_aggregate(agg, extra)) return;
    std::vector<Atom> kept;
    resolve_negs(cs.negs, 0, kept, [&] {
      std::vector<Atom> pos = body_pos;
      pos.insert(pos.end(), extra.begin(), extra.end());
      switch (cs.kind) {
        case Statement::Kind::Rule:
        case Statement::Kind::External: {
          std::vector<std::vector<GTerm>> parts(cs.head_args.size());
          for (size_t i = 0; i < cs.head_args.size(); ++i) {
            ev(cs.head_args[i], parts[i]);
            if (parts[i].empty()) return;
          }
          std::vector<GTerm> tp(cs.head_args.size());
          cartesian(parts, 0, tp, [&](const std::vector<GTerm>& tuple) {
            Atom h = st.atom(cs.head_pred, tuple);
            if (cs.kind == Statement::Kind::External) {
              add_atom(h, false);
              if (external_set.insert(h).second) {
                count_instance();
                externals.push_back(h);
              }
              return;
            }
            bool fact = kept.empty() && extra.empty();
            if (fact)
              for (Atom a : pos)
                if (!facts.count(a)) fact = false;
            add_atom(h, fact);
            emit_normal(h, pos, kept);
          });
          return;
        }
        case Statement::Kind::Constraint: {
          GroundRule r;
          r.kind = GroundRule::Kind::Constraint;
          r.pos = pos;
          r.neg = kept;
          emit(std::move(r));
          return;
        }
        case Statement::Kind::Choice:
          leaf_choice(cs, pos, kept);
          return;
        case Statement::Kind::Minimize: {
          std::vector<GTerm> ws, ps;
          ev(cs.weight, ws);
          ev(cs.prio, ps);
          if (ws.size() != 1 || ps.size() != 1 ||
              st.g_kind(ws[0]) != GKind::Int ||
              st.g_kind(ps[0]) != GKind::Int) {
            warn("minimize weight/priority must be single integers; dropped");
            return;
          }
          std::vector<std::vector<GTerm>> parts(cs.tuple.size());
          for (size_t i = 0; i < cs.tuple.size(); ++i) {
            ev(cs.tuple[i], parts[i]);
            if (parts[i].empty()) return;
          }
          std::vector<GTerm> tp(cs.tuple.size());
          cartesian(parts, 0, tp, [&](const std::vector<GTerm>& tuple) {
            MinElem e;
            e.weight = st.g_num(ws[0]);
            e.priority = st.g_num(ps[0]);
            e.tuple = tuple;
            e.pos = pos;
            e.neg = kept;
            sort_atoms(st, e.pos);
            sort_atoms(st, e.neg);
            std::string k = std::to_string(e.weight) + "@" +
                            std::to_string(e.priority) + ":";
            for (GTerm t : e.tuple) k += std::to_string(t) + ",";
            k += ";";
            for (Atom a : e.pos) k += std::to_string(a) + ",";
            k += ";";
            for (Atom a : e.neg) k += std::to_string(a) + ",";
            if (min_keys.insert(k).second) {
              count_instance();
              minimize.push_back(std::move(e));
            }
          });
          return;
        }
        default:
          return;
      }
    });
  }

  void leaf_choice(CStmt& cs, const std::vector<Atom>& body_pos,
                   const std::vector<Atom>& body_neg) {
    struct ElemInst {
      Atom head;
      std::vector<Atom> cpos, cneg;
    };
    std::vector<ElemInst> insts;
    for (CElem& e : cs.elems) {
      std::vector<Atom> cpos;
      run_cond(e.cond, cpos, [&](std::vector<Atom>& kept) {
        std::vector<std::vector<GTerm>> parts(e.args.size());
        for (size_t i = 0; i < e.args.size(); ++i) {
          ev(e.args[i], parts[i]);
          if (parts[i].empty()) return;
        }
        std::vector<GTerm> tp(e.args.size());
        cartesian(parts, 0, tp, [&](const std::vector<GTerm>& tuple) {
          Atom h = st.atom(e.pred, tuple);
          add_atom(h, false);
          GroundRule r;
          r.kind = GroundRule::Kind::Choice;
          r.head = h;
          r.pos = body_pos;
          r.pos.insert(r.pos.end(), cpos.begin(), cpos.end());
          r.neg = body_neg;
          r.neg.insert(r.neg.end(), kept.begin(), kept.end());
          emit(std::move(r));
          ElemInst ei;
          ei.head = h;
          ei.cpos = cpos;
          ei.cneg = kept;
          insts.push_back(std::move(ei));
        });
      });
    }
    if (!cs.lb && !cs.ub) return;

    auto bound_val = [&](const std::optional<CTerm>& t,
                         std::optional<int64_t>& out) -> bool {
      if (!t) return true;
      std::vector<GTerm> vs;
      ev(*t, vs);
      if (vs.size() != 1 || st.g_kind(vs[0]) != GKind::Int) {
        warn("choice bound must be a single integer; rule dropped");
        return false;
      }
      out = st.g_num(vs[0]);
      return true;
    };
    std::optional<int64_t> lb, ub;
    if (!bound_val(cs.lb, lb) || !bound_val(cs.ub, ub)) return;

    // indicators: one per distinct element head
    std::map<Atom, std::vector<ElemInst*>> by_head;
    for (ElemInst& ei : insts) by_head[ei.head].push_back(&ei);
    std::vector<std::pair<Atom, std::vector<ElemInst*>>> heads(by_head.begin(),
                                                               by_head.end());
    std::sort(heads.begin(), heads.end(), [&](const auto& a, const auto& b) {
      return st.cmp_atom(a.first, b.first) < 0;
    });
    int64_t m = static_cast<int64_t>(heads.size());

    bool need_lb = lb && *lb > 0;
    bool need_ub = ub && *ub < m;
    if (lb && *lb > m) {  // unsatisfiable whenever the body holds
      GroundRule r;
      r.kind = GroundRule::Kind::Constraint;
      r.pos = body_pos;
      r.neg = body_neg;
      emit(std::move(r));
      return;
    }
    if (ub && *ub < 0) {
      GroundRule r;
      r.kind = GroundRule::Kind::Constraint;
      r.pos = body_pos;
      r.neg = body_neg;
      emit(std::move(r));
      return;
    }
    if (!need_lb && !need_ub) return;

    Sym indp = st.sym("__ind");
    uint64_t g = gid++;
    std::vector<Atom> inds;
    int64_t k = 0;
    for (auto& [h, es] : heads) {
      bool condless = false;
      for (ElemInst* e : es)
        if (e->cpos.empty() && e->cneg.empty()) condless = true;
      if (condless) {
        inds.push_back(h);
      } else {
        Atom ind =
            st.atom(indp, {st.g_int(static_cast<int64_t>(g)), st.g_int(k)});
        add_atom(ind, false);
        for (ElemInst* e : es) {
          std::vector<Atom> p = e->cpos;
          p.push_back(h);
          emit_normal(ind, std::move(p), e->cneg);
        }
        inds.push_back(ind);
      }
      ++k;
    }
    size_t depth = 0;
    if (need_ub) depth = static_cast<size_t>(*ub + 1);
    if (need_lb) depth = std::max(depth, static_cast<size_t>(*lb));
    std::vector<Atom> row = make_counter(inds, depth);
    if (need_ub) {
      GroundRule r;
      r.kind = GroundRule::Kind::Constraint;
      r.pos = body_pos;
      r.pos.push_back(row[static_cast<size_t>(*ub)]);
      r.neg = body_neg;
      emit(std::move(r));
    }
    if (need_lb) {
      GroundRule r;
      r.kind = GroundRule::Kind::Constraint;
      r.pos = body_pos;
      r.neg = body_neg;
      r.neg.push_back(row[static_cast<size_t>(*lb - 1)]);
      emit(std::move(r));
    }
  }

  void eval_stmt(CStmt& cs, int driver, size_t dlo, size_t dhi) {
    auto it = cs.plans.find(driver);
    if (it == cs.plans.end()) {
      it = cs.plans
               .emplace(driver, build_plan(cs.pos, cs.cmps, {},
                                           driver))
               .first;
    }
    slots.assign(static_cast<size_t>(cs.nvars), kUnbound);
    trail.clear();
    std::vector<Atom> pos_acc;
    exec_plan(it->second, 0, cs.pos, cs.cmps, driver, dlo, dhi, pos_acc,
              [&] { leaf_instance(cs, pos_acc); });
  }
};

// --- union-find for statement definer keys ------------------------------------

struct UF {
  std::map<uint64_t, uint64_t> p;
  uint64_t find(uint64_t x) {
    auto it = p.find(x);
    if (it == p.end()) {
      p[x] = x;
      return x;
    }
    if (it->second == x) return x;
    return it->second = find(it->second);
  }
  void unite(uint64_t a, uint64_t b) { p[find(a)] = find(b); }
};

}  // namespace

std::vector<GTerm> eval_term(Store& st, const TermPtr& t) {
  VarMap vm;
  CTerm c = compile_term(st, t, vm);
  if (!vm.ids.empty()) throw GroundError("eval_term over non-ground term");
  GroundOptions opts;
  Grounder g(st, opts);
  std::vector<GTerm> out;
  g.ev(c, out);
  return out;
}

GroundProgram instantiate(Store& st, const std::vector<Statement>& stmts,
                          const AtomBase& base, const GroundOptions& opts) {
  Grounder G(st, opts);

  // seed index with the atom base
  for (Atom a : base.atoms) G.add_atom(a, false);
  for (Atom a : base.facts) G.add_atom(a, true);

  // compile statements
  std::vector<CStmt> cs;
  cs.reserve(stmts.size());
  std::vector<std::vector<uint64_t>> deps(stmts.size());
  for (const Statement& s : stmts) {
    CStmt c;
    c.kind = s.kind;
    VarMap vm;
    auto grab_body = [&](const std::vector<BodyElem>& body) {
      for (const BodyElem& be : body) {
        if (be.kind == BodyElem::Kind::Lit) {
          const Literal& l = be.lit;
          if (l.kind == Literal::Kind::Cmp) {
            CmpC cc;
            cc.op = l.cmp.op;
            cc.l = compile_term(st, l.cmp.lhs, vm);
            cc.r = compile_term(st, l.cmp.rhs, vm);
            cc.vars = cc.l.vars;
            for (int v : cc.r.vars)
              if (std::find(cc.vars.begin(), cc.vars.end(), v) ==
                  cc.vars.end())
                cc.vars.push_back(v);
            c.cmps.push_back(std::move(cc));
          } else if (l.kind == Literal::Kind::Pos) {
            c.pos.push_back(compile_atom(st, l.atom, vm));
          } else {
            c.negs.push_back(compile_atom(st, l.atom, vm));
          }
        } else {
          AggC a;
          a.op = be.agg.op;
          a.bound = compile_term(st, be.agg.bound, vm);
          for (const AggElem& e : be.agg.elems) {
            AElem ae;
            for (const auto& t : e.tuple)
              ae.tuple.push_back(compile_term(st, t, vm));
            ae.cond = compile_cond(st, e.cond, vm);
            a.elems.push_back(std::move(ae));
          }
          c.aggs.push_back(std::move(a));
        }
      }
    };
    switch (s.kind) {
      case Statement::Kind::Rule:
      case Statement::Kind::External: {
        grab_body(s.body);
        c.head_pred = st.sym(s.head.pred);
        for (const auto& t : s.head.args)
          c.head_args.push_back(compile_term(st, t, vm));
        c.definer_keys.push_back(pred_key(c.head_pred, s.head.args.size()));
        break;
      }
      case Statement::Kind::Constraint:
        grab_body(s.body);
        break;
      case Statement::Kind::Choice: {
        grab_body(s.body);
        if (s.lb) c.lb = compile_term(st, *s.lb, vm);
        if (s.ub) c.ub = compile_term(st, *s.ub, vm);
        for (const ChoiceElem& e : s.elems) {
          CElem ce;
          ce.pred = st.sym(e.atom.pred);
          for (const auto& t : e.atom.args)
            ce.args.push_back(compile_term(st, t, vm));
          ce.cond = compile_cond(st, e.cond, vm);
          c.definer_keys.push_back(pred_key(ce.pred, e.atom.args.size()));
          c.elems.push_back(std::move(ce));
        }
        break;
      }
      case Statement::Kind::Minimize: {
        for (const Literal& l : s.cond) {
          BodyElem be;
          be.kind = BodyElem::Kind::Lit;
          be.lit = l;
          // reuse body compilation
          std::vector<BodyElem> one{be};
          grab_body(one);
        }
        c.weight = compile_term(st, s.weight, vm);
        c.prio = compile_term(st, s.priority, vm);
        for (const auto& t : s.tuple) c.tuple.push_back(compile_term(st, t, vm));
        break;
      }
      case Statement::Kind::Show:
        G.shows.push_back({st.sym(s.show_pred), s.show_arity});
        break;
      case Statement::Kind::Program:
        break;
    }
    c.nvars = static_cast<int>(vm.ids.size());
    // body dependencies (predicate keys)
    auto& dep = deps[cs.size()];
    auto add_block = [&](const CondBlock& b) {
      for (const LitC& l : b.pos) dep.push_back(l.key);
      for (const LitC& l : b.negs) dep.push_back(l.key);
    };
    for (const LitC& l : c.pos) dep.push_back(l.key);
    for (const LitC& l : c.negs) dep.push_back(l.key);
    for (const AggC& a : c.aggs)
      for (const AElem& e : a.elems) add_block(e.cond);
    for (const CElem& e : c.elems) add_block(e.cond);
    // global binding variables of the outer body
    for (const LitC& l : c.pos) {
      std::set<int> b;
      for (const CTerm& t : l.args) pattern_binds(t, b);
      c.global_bound.insert(b.begin(), b.end());
    }
    cs.push_back(std::move(c));
  }

  // dependency graph over predicate keys; all definer keys of one statement
  // are merged so the statement lands in a single component
  UF uf;
  for (CStmt& c : cs)
    for (size_t i = 1; i < c.definer_keys.size(); ++i)
      uf.unite(c.definer_keys[0], c.definer_keys[i]);

  std::map<uint64_t, int> node_of;
  std::vector<uint64_t> node_key;
  auto node = [&](uint64_t key) {
    key = uf.find(key);
    auto it = node_of.find(key);
    if (it != node_of.end()) return it->second;
    int id = static_cast<int>(node_key.size());
    node_of[key] = id;
    node_key.push_back(key);
    return id;
  };
  // pseudo definer nodes for headless statements
  std::vector<int> stmt_node(cs.size(), -1);
  std::vector<std::vector<int>> edges;
  auto ensure_edges = [&](size_t n) {
    if (edges.size() < n) edges.resize(n);
  };
  uint64_t pseudo = 1ull << 58;
  for (size_t i = 0; i < cs.size(); ++i) {
    int u = cs[i].definer_keys.empty() ? node(pseudo + i)
                                       : node(cs[i].definer_keys[0]);
    stmt_node[i] = u;
    ensure_edges(node_key.size());
    for (uint64_t d : deps[i]) {
      int v = node(d);
      ensure_edges(node_key.size());
      edges[u].push_back(v);
    }
  }
  ensure_edges(node_key.size());

  // Tarjan SCC, iterative; components come out dependencies-first
  size_t n = node_key.size();
  std::vector<int> comp(n, -1), low(n), num(n, -1), stk;
  std::vector<bool> on(n, false);
  int counter = 0, ncomp = 0;
  std::vector<std::vector<int>> comp_nodes;
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
        if (num[v] == -1) {
          frames.emplace_back(v, 0);
        } else if (on[v]) {
          low[u] = std::min(low[u], num[v]);
        }
        continue;
      }
      if (low[u] == num[u]) {
        comp_nodes.emplace_back();
        for (;;) {
          int w = stk.back();
          stk.pop_back();
          on[w] = false;
          comp[w] = ncomp;
          comp_nodes.back().push_back(w);
          if (w == u) break;
        }
        ++ncomp;
      }
      int uu = u;
      frames.pop_back();
      if (!frames.empty())
        low[frames.back().first] = std::min(low[frames.back().first], low[uu]);
    }
  }

  std::vector<std::vector<int>> comp_stmts(ncomp);
  for (size_t i = 0; i < cs.size(); ++i)
    comp_stmts[comp[stmt_node[i]]].push_back(static_cast<int>(i));

  // evaluate components bottom-up
  for (int ci = 0; ci < ncomp; ++ci) {
    auto& sids = comp_stmts[ci];
    if (sids.empty()) continue;
    G.comp_defined.clear();
    for (int si : sids)
      for (uint64_t k : cs[si].definer_keys) G.comp_defined.insert(k);
    for (int si : sids) {
      CStmt& c = cs[si];
      c.drivers.clear();
      for (size_t li = 0; li < c.pos.size(); ++li)
        if (G.comp_defined.count(c.pos[li].key))
          c.drivers.push_back(static_cast<int>(li));
      c.rerun_full = false;
      auto check_block = [&](const CondBlock& b, bool agg) {
        for (const LitC& l : b.pos)
          if (G.comp_defined.count(l.key)) {
            if (agg)
              throw GroundError(
                  "count aggregate over a predicate of the same component");
            c.rerun_full = true;
          }
      };
      for (const AggC& a : c.aggs)
        for (const AElem& e : a.elems) check_block(e.cond, true);
      for (const CElem& e : c.elems) check_block(e.cond, false);
      // compile condition plans with global bindings known
      auto plan_block = [&](CondBlock& b) {
        b.plan = build_plan(b.pos, b.cmps, c.global_bound, -1);
      };
      for (AggC& a : c.aggs)
        for (AElem& e : a.elems) plan_block(e.cond);
      for (CElem& e : c.elems) plan_block(e.cond);
    }

    // snapshot sizes of the component's predicates (delta frontiers)
    std::map<uint64_t, size_t> frontier;
    for (uint64_t k : G.comp_defined) frontier[k] = G.pred_data(k).list.size();

    for (int si : sids) G.eval_stmt(cs[si], -1, 0, 0);

    for (;;) {
      bool any = false;
      std::map<uint64_t, std::pair<size_t, size_t>> delta;
      for (uint64_t k : G.comp_defined) {
        size_t now = G.pred_data(k).list.size();
        delta[k] = {frontier[k], now};
        if (now > frontier[k]) any = true;
        frontier[k] = now;
      }
      if (!any) break;
      for (int si : sids) {
        CStmt& c = cs[si];
        if (c.rerun_full) {
          G.eval_stmt(c, -1, 0, 0);
          continue;
        }
        for (int d : c.drivers) {
          auto [lo, hi] = delta[c.pos[static_cast<size_t>(d)].key];
          if (lo == hi) continue;
          G.eval_stmt(c, d, lo, hi);
        }
      }
    }
  }

  // final filter: erase negative literals over atoms outside the derivable
  // base; drop rules whose positive body escaped it (defensive); re-dedupe
  GroundProgram out;
  std::unordered_set<std::string> final_keys;
  for (GroundRule& r : G.rules) {
    bool ok = true;
    for (Atom a : r.pos)
      if (!G.registered.count(a)) ok = false;
    if (!ok) continue;
    std::vector<Atom> neg;
    for (Atom a : r.neg)
      if (G.registered.count(a)) neg.push_back(a);
    r.neg = std::move(neg);
    auto key = G.rule_hash_key(r);
    if (!final_keys.insert(std::move(key)).second) continue;
    out.rules.push_back(std::move(r));
  }
  for (MinElem& e : G.minimize) {
    bool ok = true;
    for (Atom a : e.pos)
      if (!G.registered.count(a)) ok = false;
    if (!ok) continue;
    std::vector<Atom> neg;
    for (Atom a : e.neg)
      if (G.registered.count(a)) neg.push_back(a);
    e.neg = std::move(neg);
    out.minimize.push_back(std::move(e));
  }
  out.externals = G.externals;
  sort_atoms(st, out.externals);
  out.shows = G.shows;
  std::sort(out.shows.begin(), out.shows.end());
  out.shows.erase(std::unique(out.shows.begin(), out.shows.end()),
                  out.shows.end());
  for (const GroundRule& r : out.rules)
    if (r.kind == GroundRule::Kind::Normal && G.facts.count(r.head))
      out.facts.push_back(r.head);
  sort_atoms(st, out.facts);

  if (opts.simplify_facts) {
    std::vector<Atom> fl(G.facts.begin(), G.facts.end());
    sort_atoms(st, fl);
    out.rules = simplify_with_facts(out.rules, fl);
  }
  if (opts.aux_next) *opts.aux_next = G.gid;
  return out;
}

std::map<Atom, std::vector<Atom>> dependency_graph(
    const std::vector<GroundRule>& rules) {
  std::map<Atom, std::vector<Atom>> g;
  for (const GroundRule& r : rules) {
    if (r.head == kNoAtom) continue;
    auto& v = g[r.head];
    v.insert(v.end(), r.pos.begin(), r.pos.end());
  }
  for (auto& [h, v] : g) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return g;
}

std::vector<GroundRule> simplify_with_facts(const std::vector<GroundRule>& rules,
                                            const std::vector<Atom>& facts) {
  std::unordered_set<Atom> f(facts.begin(), facts.end());
  std::vector<GroundRule> out;
  out.reserve(rules.size());
  for (const GroundRule& r : rules) {
    GroundRule n = r;
    n.pos.clear();
    for (Atom a : r.pos)
      if (!f.count(a) || (r.kind == GroundRule::Kind::Normal && r.head == a))
        n.pos.push_back(a);
    out.push_back(std::move(n));
  }
  return out;
}

std::string rule_to_string(const Store& st, const GroundRule& r) {
  std::string out;
  auto body = [&]() {
    std::string b;
    bool first = true;
    for (Atom a : r.pos) {
      if (!first) b += ", ";
      first = false;
      b += st.atom_to_string(a);
    }
    for (Atom a : r.neg) {
      if (!first) b += ", ";
      first = false;
      b += "not " + st.atom_to_string(a);
    }
    return b;
  };
  switch (r.kind) {
    case GroundRule::Kind::Normal:
      out = st.atom_to_string(r.head);
      if (!r.pos.empty() || !r.neg.empty()) out += " :- " + body();
      break;
    case GroundRule::Kind::Constraint:
      out = ":- " + body();
      break;
    case GroundRule::Kind::Choice:
      out = "{" + st.atom_to_string(r.head) + "}";
      if (!r.pos.empty() || !r.neg.empty()) out += " :- " + body();
      break;
  }
  out += ".";
  return out;
}

std::string dump_ground(const Store& st, const std::vector<GroundRule>& rules,
                        const std::vector<Atom>& externals,
                        const std::vector<Atom>& inputs, bool with_inputs) {
  std::vector<std::string> kinds[3];
  for (const GroundRule& r : rules)
    kinds[static_cast<int>(r.kind)].push_back(rule_to_string(st, r));
  std::string out;
  for (auto& lines : kinds) {
    std::sort(lines.begin(), lines.end());
    for (auto& l : lines) {
      out += l;
      out += '\n';
    }
  }
  std::vector<Atom> ext = externals;
  sort_atoms(st, ext);
  for (Atom a : ext) out += "#external " + st.atom_to_string(a) + ".\n";
  if (with_inputs) {
    std::vector<Atom> in = inputs;
    sort_atoms(st, in);
    for (Atom a : in) out += "#input " + st.atom_to_string(a) + ".\n";
  }
  return out;
}

}  // namespace mshot
