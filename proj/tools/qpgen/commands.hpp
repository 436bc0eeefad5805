#pragma once

#include <csignal>
#include <string>

#include "config.hpp"

namespace qpgen::cli {

enum ExitCode {
  kOk = 0,
  kAuditFailed = 1,
  kInvalid = 2,
  kNumeric = 3,
  kInterrupted = 130,
};

struct RunOptions {
  int threads = 1;
  bool svg = false;
};

/// Set from the SIGINT handler; sweeps stop at the next chunk boundary.
extern volatile std::sig_atomic_t g_interrupted;
void install_interrupt_handler();

int cmd_sweep(const RunConfig& cfg, const RunOptions& opt);
int cmd_structure_factors(const RunConfig& cfg, const RunOptions& opt);
int cmd_potential(const RunConfig& cfg, const RunOptions& opt);
int cmd_label_demo(const RunConfig& cfg, const RunOptions& opt);
int cmd_converge(const RunConfig& cfg, const RunOptions& opt);

/// Output path `<out_dir>/<stem><suffix>`; creates the directory.
std::string output_path(const RunConfig& cfg, const std::string& suffix);

}  // namespace qpgen::cli
