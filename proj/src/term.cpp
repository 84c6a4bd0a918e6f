#include "mshot/term.hpp"

#include <algorithm>
#include <cstring>

namespace mshot {

TermPtr Term::mk_int(int64_t v) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Int;
  t->num = v;
  return t;
}
TermPtr Term::mk_const(std::string n) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Const;
  t->name = std::move(n);
  return t;
}
TermPtr Term::mk_var(std::string n) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->name = std::move(n);
  return t;
}
TermPtr Term::mk_func(std::string n, std::vector<TermPtr> a) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Func;
  t->name = std::move(n);
  t->args = std::move(a);
  return t;
}
TermPtr Term::mk_bin(char op, TermPtr l, TermPtr r) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::BinOp;
  t->op = op;
  t->args = {std::move(l), std::move(r)};
  return t;
}
TermPtr Term::mk_neg(TermPtr x) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Neg;
  t->args = {std::move(x)};
  return t;
}
TermPtr Term::mk_interval(TermPtr lo, TermPtr hi) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Interval;
  t->args = {std::move(lo), std::move(hi)};
  return t;
}
TermPtr Term::mk_pool(std::vector<TermPtr> alts) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Pool;
  t->args = std::move(alts);
  return t;
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->num != b->num || a->name != b->name ||
      a->op != b->op || a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  return true;
}

static int binop_prec(char op) {
  switch (op) {
    case '*':
    case '/':
    case '\\':
      return 3;
    case '+':
    case '-':
      return 2;
  }
  return 0;
}

static void term_str_rec(const TermPtr& t, std::string& out, int parent_prec) {
  switch (t->kind) {
    case TermKind::Int:
      out += std::to_string(t->num);
      break;
    case TermKind::Const:
    case TermKind::Var:
      out += t->name;
      break;
    case TermKind::Func: {
      out += t->name;
      out += '(';
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ',';
        term_str_rec(t->args[i], out, 0);
      }
      out += ')';
      break;
    }
    case TermKind::BinOp: {
      int p = binop_prec(t->op);
      bool paren = p < parent_prec;
      if (paren) out += '(';
      term_str_rec(t->args[0], out, p);
      out += t->op;
      term_str_rec(t->args[1], out, p + 1);  // left associative
      if (paren) out += ')';
      break;
    }
    case TermKind::Neg: {
      out += '-';
      term_str_rec(t->args[0], out, 4);
      break;
    }
    case TermKind::Interval: {
      bool paren = parent_prec > 1;
      if (paren) out += '(';
      term_str_rec(t->args[0], out, 2);
      out += "..";
      term_str_rec(t->args[1], out, 2);
      if (paren) out += ')';
      break;
    }
    case TermKind::Pool: {
      out += '(';
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ';';
        term_str_rec(t->args[i], out, 0);
      }
      out += ')';
      break;
    }
  }
}

std::string term_str(const TermPtr& t) {
  std::string out;
  term_str_rec(t, out, 0);
  return out;
}

// --- Store -----------------------------------------------------------------

Sym Store::sym(std::string_view s) {
  auto it = sym_ids_.find(std::string(s));
  if (it != sym_ids_.end()) return it->second;
  Sym id = static_cast<Sym>(syms_.size());
  syms_.emplace_back(s);
  sym_ids_.emplace(syms_.back(), id);
  return id;
}

std::string Store::term_key(GKind k, int64_t num, Sym name,
                            const std::vector<GTerm>& args) {
  std::string key;
  key.reserve(10 + args.size() * 4);
  key += static_cast<char>(k);
  key.append(reinterpret_cast<const char*>(&num), sizeof(num));
  key.append(reinterpret_cast<const char*>(&name), sizeof(name));
  for (GTerm a : args) key.append(reinterpret_cast<const char*>(&a), sizeof(a));
  return key;
}

std::string Store::atom_key(Sym pred, const std::vector<GTerm>& args) {
  return term_key(GKind::Func, 0, pred, args);
}

GTerm Store::g_int(int64_t v) {
  auto key = term_key(GKind::Int, v, 0, {});
  auto it = term_ids_.find(key);
  if (it != term_ids_.end()) return it->second;
  GTerm id = static_cast<GTerm>(terms_.size());
  terms_.push_back({GKind::Int, v, 0, {}});
  term_ids_.emplace(std::move(key), id);
  return id;
}

GTerm Store::g_const(Sym name) {
  auto key = term_key(GKind::Const, 0, name, {});
  auto it = term_ids_.find(key);
  if (it != term_ids_.end()) return it->second;
  GTerm id = static_cast<GTerm>(terms_.size());
  terms_.push_back({GKind::Const, 0, name, {}});
  term_ids_.emplace(std::move(key), id);
  return id;
}

GTerm Store::g_func(Sym name, std::vector<GTerm> args) {
  auto key = term_key(GKind::Func, 0, name, args);
  auto it = term_ids_.find(key);
  if (it != term_ids_.end()) return it->second;
  GTerm id = static_cast<GTerm>(terms_.size());
  terms_.push_back({GKind::Func, 0, name, std::move(args)});
  term_ids_.emplace(std::move(key), id);
  return id;
}

Atom Store::atom(Sym pred, std::vector<GTerm> args) {
  auto key = atom_key(pred, args);
  auto it = atom_ids_.find(key);
  if (it != atom_ids_.end()) return it->second;
  Atom id = static_cast<Atom>(atoms_.size());
  atoms_.push_back({pred, std::move(args)});
  atom_ids_.emplace(std::move(key), id);
  return id;
}

std::optional<Atom> Store::find_atom(Sym pred,
                                     const std::vector<GTerm>& args) const {
  auto it = atom_ids_.find(atom_key(pred, args));
  if (it == atom_ids_.end()) return std::nullopt;
  return it->second;
}

int Store::cmp_term(GTerm a, GTerm b) const {
  if (a == b) return 0;
  const TermNode& x = terms_[a];
  const TermNode& y = terms_[b];
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  switch (x.kind) {
    case GKind::Int:
      return x.num < y.num ? -1 : x.num > y.num ? 1 : 0;
    case GKind::Const: {
      int c = syms_[x.name].compare(syms_[y.name]);
      return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    case GKind::Func: {
      int c = syms_[x.name].compare(syms_[y.name]);
      if (c) return c < 0 ? -1 : 1;
      if (x.args.size() != y.args.size())
        return x.args.size() < y.args.size() ? -1 : 1;
      for (size_t i = 0; i < x.args.size(); ++i) {
        c = cmp_term(x.args[i], y.args[i]);
        if (c) return c;
      }
      return 0;
    }
  }
  return 0;
}

int Store::cmp_atom(Atom a, Atom b) const {
  if (a == b) return 0;
  const AtomNode& x = atoms_[a];
  const AtomNode& y = atoms_[b];
  int c = syms_[x.pred].compare(syms_[y.pred]);
  if (c) return c < 0 ? -1 : 1;
  if (x.args.size() != y.args.size())
    return x.args.size() < y.args.size() ? -1 : 1;
  for (size_t i = 0; i < x.args.size(); ++i) {
    c = cmp_term(x.args[i], y.args[i]);
    if (c) return c;
  }
  return 0;
}

std::string Store::term_to_string(GTerm t) const {
  const TermNode& n = terms_[t];
  switch (n.kind) {
    case GKind::Int:
      return std::to_string(n.num);
    case GKind::Const:
      return syms_[n.name];
    case GKind::Func: {
      std::string out = syms_[n.name];
      out += '(';
      for (size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        out += term_to_string(n.args[i]);
      }
      out += ')';
      return out;
    }
  }
  return {};
}

std::string Store::atom_to_string(Atom a) const {
  const AtomNode& n = atoms_[a];
  std::string out = syms_[n.pred];
  if (!n.args.empty()) {
    out += '(';
    for (size_t i = 0; i < n.args.size(); ++i) {
      if (i) out += ',';
      out += term_to_string(n.args[i]);
    }
    out += ')';
  }
  return out;
}

void sort_atoms(const Store& st, std::vector<Atom>& v) {
  std::sort(v.begin(), v.end(),
            [&](Atom a, Atom b) { return st.cmp_atom(a, b) < 0; });
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_terms(const Store& st, std::vector<GTerm>& v) {
  std::sort(v.begin(), v.end(),
            [&](GTerm a, GTerm b) { return st.cmp_term(a, b) < 0; });
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace mshot
