#pragma once

#include <iosfwd>

#include "mshot/control.hpp"

namespace mshot {

// exit codes: 0 = some solve call was satisfiable, 1 = none was, 2 = error
struct DriverConfig {
  std::vector<std::string> files;
  int64_t models = 1;  // per solve call; 0 = all
  std::string mode = "single";
  std::string script_file;
  bool dump_ground = false;
  bool incmode_cleanup = false;  // cleanup between incmode steps
  ControlOptions ctl;
};

int run_single_shot(const DriverConfig& cfg, std::ostream& out);
int run_incmode(const DriverConfig& cfg, std::ostream& out);
int run_script(const DriverConfig& cfg, std::ostream& out);

// dispatches on cfg.mode (single shot switches to incmode when the
// program requests it via #include <incmode>)
int run(const DriverConfig& cfg, std::ostream& out);

}  // namespace mshot
