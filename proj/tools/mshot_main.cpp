#include <cctype>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mshot/driver.hpp"

using namespace mshot;

int main(int argc, char** argv) {
  CLI::App app{"multi-shot answer set solver"};

  std::vector<std::string> positionals;
  std::string mode = "single";
  std::string script_file;
  std::string trace_file;
  std::vector<std::string> consts;
  DriverConfig cfg;

  app.add_option("inputs", positionals,
                 "input files; a bare integer sets the model count (0 = all)");
  app.add_option("-c,--const", consts,
                 "define a constant, e.g. -c n=8 (repeatable)");
  app.add_option("--mode", mode, "single, incmode or script")
      ->check(CLI::IsMember({"single", "incmode", "script"}));
  app.add_option("--script", script_file, "script file (implies --mode script)");
  app.add_flag("--dump-ground", cfg.dump_ground,
               "print the ground program instead of solving");
  app.add_flag("--lax-composition", cfg.ctl.lax_composition,
               "warn instead of fail on cross-module positive loops");
  app.add_flag("--simplify-facts", cfg.ctl.simplify_facts,
               "propagate facts while grounding");
  app.add_flag("--cleanup", cfg.incmode_cleanup,
               "run cleanup between incmode steps");
  app.add_option("--trace", trace_file, "append control operations to a file");

  CLI11_PARSE(app, argc, argv);

  bool models_set = false;
  for (const std::string& p : positionals) {
    bool numeric = !p.empty();
    for (char ch : p)
      if (!std::isdigit(static_cast<unsigned char>(ch))) numeric = false;
    if (numeric && !models_set) {
      cfg.models = std::stoll(p);
      models_set = true;
    } else {
      cfg.files.push_back(p);
    }
  }
  if (cfg.files.empty()) {
    std::cerr << "error: no input files\n";
    return 2;
  }

  for (const std::string& c : consts) {
    size_t eq = c.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: -c expects name=value\n";
      return 2;
    }
    try {
      cfg.ctl.consts.emplace_back(c.substr(0, eq),
                                  parse_term_text(c.substr(eq + 1)));
    } catch (const std::exception& e) {
      std::cerr << "error: bad constant '" << c << "': " << e.what() << "\n";
      return 2;
    }
  }

  if (!script_file.empty()) {
    cfg.script_file = script_file;
    mode = "script";
  }
  cfg.mode = mode;
  if (mode == "script" && cfg.script_file.empty()) {
    std::cerr << "error: --mode script needs --script FILE\n";
    return 2;
  }

  std::shared_ptr<std::ofstream> trace_out;
  if (!trace_file.empty()) {
    trace_out = std::make_shared<std::ofstream>(trace_file, std::ios::app);
    if (!*trace_out) {
      std::cerr << "error: cannot open trace file '" << trace_file << "'\n";
      return 2;
    }
    cfg.ctl.trace = [trace_out](const std::string& line) {
      *trace_out << line << "\n";
    };
  }
  cfg.ctl.log = [](const std::string& msg) {
    std::cerr << "warning: " << msg << "\n";
  };

  return run(cfg, std::cout);
}
