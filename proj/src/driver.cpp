#include <cctype>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "mshot/driver.hpp"
#include "mshot/ground.hpp"

namespace mshot {

namespace {

std::string read_files(const std::vector<std::string>& files) {
  std::string text;
  for (const std::string& f : files) {
    std::ifstream in(f);
    if (!in) throw Error("cannot open '" + f + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text += ss.str();
    text += "\n";
  }
  return text;
}

struct Printer {
  std::ostream& out;
  int64_t total = 0, calls = 0;
  bool any_sat = false;

  void solve_call(const SystemState& s, const SolveResult& r, bool opt) {
    ++calls;
    out << "Solving...\n";
    int64_t n = 0;
    for (const auto& [m, c] : r.models) {
      ++n;
      ++total;
      out << "Answer: " << n << "\n";
      std::vector<Atom> sh = shown_atoms(s, m);
      for (size_t i = 0; i < sh.size(); ++i) {
        if (i) out << " ";
        out << s.store.atom_to_string(sh[i]);
      }
      out << "\n";
      if (opt) {
        out << "Optimization:";
        for (auto it = c.weights.rbegin(); it != c.weights.rend(); ++it)
          out << " " << it->second;
        out << "\n";
      }
    }
    if (r.models.empty()) {
      out << "UNSATISFIABLE\n";
    } else {
      out << "SATISFIABLE\n";
      any_sat = true;
    }
  }

  void summary() {
    out << "\nModels : " << total << "\n";
    out << "Calls  : " << calls << "\n";
  }

  int exit_code() const { return any_sat ? 0 : 1; }
};

int64_t const_int(const ControlOptions& c, const std::string& name,
                  int64_t def) {
  for (const auto& [n, t] : c.consts) {
    if (n != name) continue;
    Store tmp;
    std::vector<GTerm> v = eval_term(tmp, t);
    if (v.size() == 1 && tmp.g_kind(v[0]) == GKind::Int)
      return tmp.g_num(v[0]);
    throw Error("constant '" + name + "' must be an integer");
  }
  return def;
}

std::string const_name(const ControlOptions& c, const std::string& name,
                       const std::string& def) {
  for (const auto& [n, t] : c.consts) {
    if (n != name) continue;
    Store tmp;
    std::vector<GTerm> v = eval_term(tmp, t);
    if (v.size() == 1 && tmp.g_kind(v[0]) == GKind::Const)
      return tmp.sym_str(tmp.g_name(v[0]));
    throw Error("constant '" + name + "' must be a name");
  }
  return def;
}

Atom query_atom(SystemState& s, int64_t k) {
  return s.store.atom(s.store.sym("query"), {s.store.g_int(k)});
}

int incmode_loop(SystemState& s, const DriverConfig& cfg, std::ostream& out) {
  add(s, "#program check(t).\n#external query(t).\n");
  int64_t imin = const_int(cfg.ctl, "imin", 0);
  int64_t imax = const_int(cfg.ctl, "imax", -1);
  std::string istop = const_name(cfg.ctl, "istop", "sat");
  if (istop != "sat" && istop != "unsat" && istop != "unknown")
    throw Error("istop must be sat, unsat or unknown");

  Printer p{out};
  int64_t step = 0;
  bool have = false;
  SolveResult ret;
  for (;;) {
    if (imax >= 0 && step >= imax) break;
    if (have && step >= imin) {
      if (istop == "sat" && ret.status == SolveStatus::Sat) break;
      if (istop == "unsat" && ret.status == SolveStatus::Unsat) break;
    }
    std::vector<Part> parts;
    if (step > 0) {
      release_external(s, query_atom(s, step - 1));
      parts.push_back({"step", {Term::mk_int(step)}});
    } else {
      parts.push_back({"base", {}});
    }
    parts.push_back({"check", {Term::mk_int(step)}});
    ground(s, parts);
    assign_external(s, query_atom(s, step), TruthValue::True);
    if (cfg.incmode_cleanup && step > 0) cleanup(s);
    ret = solve(s, {}, cfg.models);
    p.solve_call(s, ret, !s.minimize_elems.empty());
    have = true;
    ++step;
  }
  p.summary();
  return p.exit_code();
}

// script commands are whitespace-separated; atoms must not contain spaces
struct ScriptCtx {
  SystemState& s;
  Printer& p;
  const DriverConfig& cfg;
  std::ostream& out;
  std::optional<Model> last_model;
  std::vector<Atom> captured;  // assigned true by the last capture
};

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> ts;
  std::stringstream ss(line);
  std::string t;
  while (ss >> t) ts.push_back(t);
  return ts;
}

TruthValue parse_tv(const std::string& t, size_t lineno) {
  if (t == "t") return TruthValue::True;
  if (t == "u") return TruthValue::Undef;
  if (t == "f") return TruthValue::False;
  throw Error("script line " + std::to_string(lineno) +
              ": expected t, u or f, got '" + t + "'");
}

std::pair<std::string, int> parse_sig(const std::string& t, size_t lineno) {
  size_t slash = t.rfind('/');
  if (slash == std::string::npos)
    throw Error("script line " + std::to_string(lineno) +
                ": expected name/arity, got '" + t + "'");
  return {t.substr(0, slash), std::stoi(t.substr(slash + 1))};
}

void run_command(ScriptCtx& c, const std::vector<std::string>& ts,
                 const std::string& line, size_t lineno) {
  const std::string& cmd = ts[0];
  auto need = [&](size_t n) {
    if (ts.size() < n + 1)
      throw Error("script line " + std::to_string(lineno) +
                  ": '" + cmd + "' needs more arguments");
  };
  if (cmd == "ground") {
    need(1);
    std::vector<Part> parts;
    for (size_t i = 1; i < ts.size(); ++i) {
      AstAtom a = parse_atom_text(ts[i]);
      parts.push_back({a.pred, a.args});
    }
    ground(c.s, parts);
  } else if (cmd == "assign") {
    need(2);
    Atom a = intern_atom(c.s, parse_atom_text(ts[1]));
    assign_external(c.s, a, parse_tv(ts[2], lineno));
  } else if (cmd == "release") {
    need(1);
    release_external(c.s, intern_atom(c.s, parse_atom_text(ts[1])));
  } else if (cmd == "solve") {
    int64_t limit = c.cfg.models;
    Assumptions asum;
    size_t i = 1;
    if (i < ts.size() && ts[i] != ":") {
      limit = std::stoll(ts[i]);
      ++i;
    }
    if (i < ts.size()) {
      if (ts[i] != ":")
        throw Error("script line " + std::to_string(lineno) +
                    ": expected ':' before assumptions");
      for (++i; i < ts.size(); ++i) {
        if (ts[i][0] == '-') {
          asum.must_false.push_back(
              intern_atom(c.s, parse_atom_text(ts[i].substr(1))));
        } else {
          asum.must_true.push_back(intern_atom(c.s, parse_atom_text(ts[i])));
        }
      }
    }
    SolveResult r = solve(c.s, asum, limit);
    c.p.solve_call(c.s, r, !c.s.minimize_elems.empty());
    if (!r.models.empty()) c.last_model = r.models.back().first;
    else c.last_model.reset();
  } else if (cmd == "cleanup") {
    cleanup(c.s);
  } else if (cmd == "echo") {
    size_t at = line.find("echo");
    std::string rest = line.substr(at + 4);
    if (!rest.empty() && rest[0] == ' ') rest = rest.substr(1);
    c.out << rest << "\n";
  } else if (cmd == "capture") {
    // capture pos/3 from pos/4 at HORIZON
    need(5);
    if (ts[2] != "from" || ts[4] != "at")
      throw Error("script line " + std::to_string(lineno) +
                  ": expected 'capture P/n from Q/m at T'");
    auto [dst, dst_ar] = parse_sig(ts[1], lineno);
    auto [src, src_ar] = parse_sig(ts[3], lineno);
    if (dst_ar != src_ar - 1)
      throw Error("script line " + std::to_string(lineno) +
                  ": capture target arity must be source arity - 1");
    int64_t at_val;
    if (!ts[5].empty() && (std::isdigit(ts[5][0]) || ts[5][0] == '-')) {
      at_val = std::stoll(ts[5]);
    } else {
      constexpr int64_t unset = std::numeric_limits<int64_t>::min();
      at_val = const_int(c.cfg.ctl, ts[5], unset);
      if (at_val == unset)
        throw Error("script line " + std::to_string(lineno) +
                    ": unknown constant '" + ts[5] + "'");
    }
    if (!c.last_model)
      throw Error("script line " + std::to_string(lineno) +
                  ": capture requires a previous satisfiable solve");
    Store& st = c.s.store;
    Sym src_sym = st.sym(src), dst_sym = st.sym(dst);
    std::vector<Atom> next;
    for (Atom a : *c.last_model) {
      if (st.atom_pred(a) != src_sym) continue;
      std::vector<GTerm> args = st.atom_args(a);
      if (static_cast<int>(args.size()) != src_ar) continue;
      GTerm last = args.back();
      if (st.g_kind(last) != GKind::Int || st.g_num(last) != at_val) continue;
      args.pop_back();
      next.push_back(st.atom(dst_sym, args));
    }
    for (Atom a : c.captured) assign_external(c.s, a, TruthValue::False);
    for (Atom a : next) assign_external(c.s, a, TruthValue::True);
    c.captured = std::move(next);
  } else if (cmd == "dump") {
    c.out << dump_ground(c.s.store, c.s.module.rules, c.s.module.inputs);
  } else {
    throw Error("script line " + std::to_string(lineno) +
                ": unknown command '" + cmd + "'");
  }
}

}  // namespace

int run_single_shot(const DriverConfig& cfg, std::ostream& out) {
  SystemState s = create(read_files(cfg.files), cfg.ctl);
  if (s.incmode) return incmode_loop(s, cfg, out);
  ground(s, {{"base", {}}});
  if (cfg.dump_ground) {
    out << dump_ground(s.store, s.module.rules, s.module.inputs);
    return 0;
  }
  Printer p{out};
  SolveResult r = solve(s, {}, cfg.models);
  p.solve_call(s, r, !s.minimize_elems.empty());
  p.summary();
  return p.exit_code();
}

int run_incmode(const DriverConfig& cfg, std::ostream& out) {
  SystemState s = create(read_files(cfg.files), cfg.ctl);
  return incmode_loop(s, cfg, out);
}

int run_script(const DriverConfig& cfg, std::ostream& out) {
  std::ifstream in(cfg.script_file);
  if (!in) throw Error("cannot open script '" + cfg.script_file + "'");
  SystemState s = create(read_files(cfg.files), cfg.ctl);
  Printer p{out};
  ScriptCtx ctx{s, p, cfg, out, {}, {}};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::vector<std::string> ts = tokens_of(line);
    if (ts.empty()) continue;
    run_command(ctx, ts, line, lineno);
  }
  if (p.calls > 0) p.summary();
  return p.calls > 0 ? p.exit_code() : 0;
}

int run(const DriverConfig& cfg, std::ostream& out) {
  try {
    if (cfg.mode == "script") return run_script(cfg, out);
    if (cfg.mode == "incmode") return run_incmode(cfg, out);
    if (cfg.mode == "single") return run_single_shot(cfg, out);
    throw Error("unknown mode '" + cfg.mode + "'");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mshot
