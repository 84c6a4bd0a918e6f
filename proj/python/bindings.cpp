#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mshot/control.hpp"
#include "mshot/ground.hpp"

namespace py = pybind11;
using namespace mshot;

namespace {

TruthValue tv_from_string(const std::string& s) {
  if (s == "true" || s == "t") return TruthValue::True;
  if (s == "undef" || s == "u") return TruthValue::Undef;
  if (s == "false" || s == "f") return TruthValue::False;
  throw Error("truth value must be 'true', 'undef' or 'false'");
}

// pybind-facing wrapper around a system state
class PyControl {
 public:
  PyControl(const std::string& text,
            const std::map<std::string, std::string>& consts,
            bool lax_composition, bool simplify_facts) {
    ControlOptions opts;
    for (const auto& [name, value] : consts)
      opts.consts.emplace_back(name, parse_term_text(value));
    opts.lax_composition = lax_composition;
    opts.simplify_facts = simplify_facts;
    opts.log = [this](const std::string& msg) { warnings_.push_back(msg); };
    opts.trace = [this](const std::string& line) { trace_.push_back(line); };
    state_ = std::make_unique<SystemState>(create(text, opts));
  }

  void add(const std::string& text) { mshot::add(*state_, text); }

  void ground(const py::object& parts) {
    std::vector<Part> ps;
    auto part_of = [](py::handle h) {
      Part p;
      if (py::isinstance<py::str>(h)) {
        AstAtom a = parse_atom_text(h.cast<std::string>());
        p.name = a.pred;
        p.args = a.args;
        return p;
      }
      auto tup = h.cast<py::sequence>();
      p.name = tup[0].cast<std::string>();
      for (py::handle arg : tup[1].cast<py::sequence>()) {
        if (py::isinstance<py::int_>(arg))
          p.args.push_back(Term::mk_int(arg.cast<int64_t>()));
        else
          p.args.push_back(parse_term_text(arg.cast<std::string>()));
      }
      return p;
    };
    if (py::isinstance<py::str>(parts)) {
      ps.push_back(part_of(parts));
    } else {
      for (py::handle h : parts.cast<py::sequence>()) ps.push_back(part_of(h));
    }
    mshot::ground(*state_, ps);
  }

  void assign_external(const std::string& atom, const std::string& value) {
    Atom a = intern_atom(*state_, parse_atom_text(atom));
    mshot::assign_external(*state_, a, tv_from_string(value));
  }

  void release_external(const std::string& atom) {
    Atom a = intern_atom(*state_, parse_atom_text(atom));
    mshot::release_external(*state_, a);
  }

  py::dict solve(const std::vector<std::string>& must_true,
                 const std::vector<std::string>& must_false, int64_t limit) {
    Assumptions asum;
    for (const std::string& s : must_true)
      asum.must_true.push_back(intern_atom(*state_, parse_atom_text(s)));
    for (const std::string& s : must_false)
      asum.must_false.push_back(intern_atom(*state_, parse_atom_text(s)));
    SolveResult r = mshot::solve(*state_, asum, limit);
    py::dict out;
    out["satisfiable"] = r.status == SolveStatus::Sat;
    out["exhausted"] = r.exhausted;
    py::list models;
    for (const auto& [m, c] : r.models) {
      py::dict entry;
      py::list atoms, shown;
      for (Atom a : m) atoms.append(state_->store.atom_to_string(a));
      for (Atom a : shown_atoms(*state_, m))
        shown.append(state_->store.atom_to_string(a));
      entry["atoms"] = atoms;
      entry["shown"] = shown;
      py::dict cost;
      for (const auto& [prio, w] : c.weights) cost[py::int_(prio)] = w;
      entry["cost"] = cost;
      models.append(entry);
    }
    out["models"] = models;
    return out;
  }

  void cleanup() { mshot::cleanup(*state_); }

  std::string dump() const {
    return dump_ground(state_->store, state_->module.rules,
                       state_->module.inputs);
  }

  std::vector<std::string> inputs() const {
    std::vector<std::string> out;
    for (Atom a : state_->module.inputs)
      out.push_back(state_->store.atom_to_string(a));
    return out;
  }

  std::vector<std::string> outputs() const {
    std::vector<std::string> out;
    for (Atom a : state_->module.outputs)
      out.push_back(state_->store.atom_to_string(a));
    return out;
  }

  std::vector<std::string> warnings() const { return warnings_; }
  std::vector<std::string> trace() const { return trace_; }

 private:
  std::unique_ptr<SystemState> state_;
  std::vector<std::string> warnings_;
  std::vector<std::string> trace_;
};

}  // namespace

PYBIND11_MODULE(mshot, m) {
  m.doc() = "multi-shot answer set solving";

  py::class_<PyControl>(m, "Control")
      .def(py::init<const std::string&,
                    const std::map<std::string, std::string>&, bool, bool>(),
           py::arg("text"),
           py::arg("consts") = std::map<std::string, std::string>{},
           py::arg("lax_composition") = false,
           py::arg("simplify_facts") = false)
      .def("add", &PyControl::add, py::arg("text"),
           "add statements to the named subprograms")
      .def("ground", &PyControl::ground, py::arg("parts"),
           "ground subprogram parts: a name, '(name,args)' pair, or a list "
           "of either")
      .def("assign_external", &PyControl::assign_external, py::arg("atom"),
           py::arg("value"), "set an external atom to true/undef/false")
      .def("release_external", &PyControl::release_external, py::arg("atom"),
           "permanently fix an external atom to false")
      .def("solve", &PyControl::solve,
           py::arg("must_true") = std::vector<std::string>{},
           py::arg("must_false") = std::vector<std::string>{},
           py::arg("limit") = 0,
           "enumerate stable models (limit 0 = all); optimizes when the "
           "program has #minimize directives")
      .def("cleanup", &PyControl::cleanup,
           "drop undefined outputs from future grounding")
      .def("dump", &PyControl::dump, "render the current ground program")
      .def("inputs", &PyControl::inputs)
      .def("outputs", &PyControl::outputs)
      .def("warnings", &PyControl::warnings)
      .def("trace", &PyControl::trace);

  m.def(
      "stable_models",
      [](const std::string& text) {
        PyControl c(text, {}, false, false);
        c.ground(py::str("base"));
        py::dict r = c.solve({}, {}, 0);
        py::list out;
        for (py::handle entry : r["models"].cast<py::list>())
          out.append(entry["atoms"]);
        return out;
      },
      py::arg("text"),
      "ground the base program of `text` and return all stable models");

  py::register_exception<Error>(m, "MshotError");
}
