#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mshot/driver.hpp"

using namespace mshot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("mshot-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& text) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p.string();
  }
};

const char* kSimple =
    "#external p(1;2;3).\n"
    "p(0) :- p(3).\n"
    "p(0) :- not p(0).\n"
    "\n"
    "#program succ(n).\n"
    "#external p(n+3).\n"
    "p(n) :- p(n+3).\n"
    "p(n) :- not p(n+1), not p(n+2).\n";

const char* kSimpleScript =
    "# drive the program through four solve calls\n"
    "ground base\n"
    "assign p(3) t\n"
    "solve 0\n"
    "assign p(3) f\n"
    "solve 0\n"
    "ground succ(1) succ(2)\n"
    "solve 0\n"
    "ground succ(3)\n"
    "solve 0\n";

const char* kExternal =
    "f(1).\nf(2).\n#external e(X) : f(X), X < 2.\n"
    "a(X) :- f(X), e(X).\nb(X) :- f(X), not e(X).\n";

const char* kIncmode =
    "#include <incmode>.\n"
    "#program step(t).\n"
    "d(t).\n"
    "#program check(t).\n"
    ":- query(t), t < 3.\n";

std::pair<int, std::string> run_capture(const DriverConfig& cfg) {
  std::ostringstream out;
  int code = run(cfg, out);
  return {code, out.str()};
}

}  // namespace

TEST_CASE("the script driver reproduces the four-call session verbatim") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("simple.lp", kSimple)};
  cfg.script_file = t.file("simple.script", kSimpleScript);
  cfg.mode = "script";
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out ==
        "Solving...\n"
        "Answer: 1\n"
        "p(0) p(3)\n"
        "SATISFIABLE\n"
        "Solving...\n"
        "UNSATISFIABLE\n"
        "Solving...\n"
        "UNSATISFIABLE\n"
        "Solving...\n"
        "Answer: 1\n"
        "p(0) p(3)\n"
        "SATISFIABLE\n"
        "\n"
        "Models : 2\n"
        "Calls  : 4\n");
}

TEST_CASE("script solve takes limits and signed assumption atoms") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("ext.lp", kExternal)};
  cfg.script_file = t.file("s.script",
                           "ground base\n"
                           "assign e(1) u\n"
                           "solve 0 : e(1)\n"
                           "solve 0 : -e(1) -b(1)\n"
                           "solve 1\n"
                           "echo done\n");
  cfg.mode = "script";
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out ==
        "Solving...\n"
        "Answer: 1\n"
        "a(1) b(2) e(1) f(1) f(2)\n"
        "SATISFIABLE\n"
        "Solving...\n"
        "UNSATISFIABLE\n"
        "Solving...\n"
        "Answer: 1\n"
        "a(1) b(2) e(1) f(1) f(2)\n"
        "SATISFIABLE\n"
        "done\n"
        "\n"
        "Models : 2\n"
        "Calls  : 3\n");
}

TEST_CASE("script capture projects the last model onto new assignments") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("cap.lp",
                      "#external q(a;b).\n"
                      "pos(a,3). pos(b,7).\n"
                      "r(X) :- q(X).\n")};
  cfg.script_file = t.file("cap.script",
                           "ground base\n"
                           "solve 1\n"
                           "capture q/1 from pos/2 at 3\n"
                           "solve 1\n");
  cfg.mode = "script";
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  // the second call sees q(a) true (from pos(a,3)) but not q(b)
  CHECK(out.find("Answer: 1\npos(a,3) pos(b,7)\n") != std::string::npos);
  CHECK(out.find("pos(a,3) pos(b,7) q(a) r(a)\n") != std::string::npos);
}

TEST_CASE("script errors carry the line number and exit with 2") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("p.lp", "a.\n")};
  cfg.script_file = t.file("bad.script", "ground base\nfrobnicate\n");
  cfg.mode = "script";
  auto [code, out] = run_capture(cfg);
  CHECK(code == 2);
}

TEST_CASE("single-shot mode solves base and reports the summary") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("p.lp", "{ a }.\nb :- a.\n")};
  cfg.models = 0;
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out ==
        "Solving...\n"
        "Answer: 1\n"
        "a b\n"
        "Answer: 2\n"
        "\n"
        "SATISFIABLE\n"
        "\n"
        "Models : 2\n"
        "Calls  : 1\n");
}

TEST_CASE("the model count limits answers per call") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("p.lp", "{ a }.\n")};
  cfg.models = 1;  // default
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out.find("Answer: 2") == std::string::npos);
}

TEST_CASE("exit codes distinguish sat, unsat and errors") {
  TempDir t;
  {
    DriverConfig cfg;
    cfg.files = {t.file("sat.lp", "a.\n")};
    CHECK(run_capture(cfg).first == 0);
  }
  {
    DriverConfig cfg;
    cfg.files = {t.file("unsat.lp", "{ a }.\n:- a.\n:- not a.\n")};
    CHECK(run_capture(cfg).first == 1);
  }
  {
    DriverConfig cfg;
    cfg.files = {t.file("bad.lp", "a :-\n")};
    CHECK(run_capture(cfg).first == 2);
  }
  {
    DriverConfig cfg;
    cfg.files = {(t.dir / "missing.lp").string()};
    CHECK(run_capture(cfg).first == 2);
  }
  {
    DriverConfig cfg;
    cfg.files = {t.file("ok.lp", "a.\n")};
    cfg.mode = "bogus";
    CHECK(run_capture(cfg).first == 2);
  }
}

TEST_CASE("dump mode prints the ground module instead of solving") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("ext.lp", kExternal)};
  cfg.dump_ground = true;
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out ==
        "a(1) :- e(1), f(1).\n"
        "b(1) :- f(1), not e(1).\n"
        "b(2) :- f(2).\n"
        "f(1).\n"
        "f(2).\n"
        "#external e(1).\n");
}

TEST_CASE("constants reach the grounder from the config") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("p.lp", "q(n).\n")};
  cfg.ctl.consts.emplace_back("n", parse_term_text("5"));
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out.find("q(5)\n") != std::string::npos);
}

TEST_CASE("incmode steps until the check passes") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("inc.lp", kIncmode)};
  // single mode switches to the incremental loop on the include directive
  std::vector<std::string> trace;
  cfg.ctl.trace = [&](const std::string& l) { trace.push_back(l); };
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out ==
        "Solving...\n"
        "UNSATISFIABLE\n"
        "Solving...\n"
        "UNSATISFIABLE\n"
        "Solving...\n"
        "UNSATISFIABLE\n"
        "Solving...\n"
        "Answer: 1\n"
        "d(1) d(2) d(3) query(3)\n"
        "SATISFIABLE\n"
        "\n"
        "Models : 1\n"
        "Calls  : 4\n");
  // the loop follows the release-ground-assign-solve shape
  REQUIRE(trace.size() >= 8);
  CHECK(trace[0] == "create()");
  CHECK(trace[1] == "ground((base,()),(check,(0)))");
  CHECK(trace[2] == "assignExternal(query(0),t)");
  CHECK(trace[3] == "solve(({},{}))");
  CHECK(trace[4] == "releaseExternal(query(0))");
  CHECK(trace[5] == "ground((step,(1)),(check,(1)))");
  CHECK(trace[6] == "assignExternal(query(1),t)");
  CHECK(trace[7] == "solve(({},{}))");
}

TEST_CASE("incmode respects imin, imax and istop") {
  TempDir t;
  std::string f = t.file("inc.lp", kIncmode);
  {
    DriverConfig cfg;
    cfg.files = {f};
    cfg.ctl.consts.emplace_back("imax", parse_term_text("2"));
    auto [code, out] = run_capture(cfg);
    CHECK(code == 1);  // stopped before any model
    CHECK(out.find("Calls  : 2") != std::string::npos);
  }
  {
    DriverConfig cfg;
    cfg.files = {f};
    cfg.ctl.consts.emplace_back("imin", parse_term_text("5"));
    auto [code, out] = run_capture(cfg);
    CHECK(code == 0);  // keeps stepping past the first model
    CHECK(out.find("Calls  : 5") != std::string::npos);
  }
  {
    DriverConfig cfg;
    cfg.files = {f};
    cfg.ctl.consts.emplace_back("istop", parse_term_text("bogus"));
    CHECK(run_capture(cfg).first == 2);
  }
}

TEST_CASE("incmode cleanup keeps the results unchanged") {
  TempDir t;
  DriverConfig cfg;
  cfg.files = {t.file("inc.lp", kIncmode)};
  cfg.incmode_cleanup = true;
  auto [code, out] = run_capture(cfg);
  CHECK(code == 0);
  CHECK(out.find("d(1) d(2) d(3) query(3)\n") != std::string::npos);
  CHECK(out.find("Calls  : 4") != std::string::npos);
}
