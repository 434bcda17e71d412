#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace nhspec::cli {

/// Raised for malformed configuration; mapped to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exit-code contract of the tool.
enum ExitCode {
  kOk = 0,
  kVerifyFailed = 1,
  kConfigError = 2,
  kComputeError = 3,
};

struct RunConfig {
  std::string command;         // spectrum | eigenstates | phase-diagram |
                               // ipr-scaling | verify
  std::string model = "ring";  // ring | flux-ring | chain | defect-ring
  int size = 20;
  double alpha = 1.0;
  double beta = 1.0;
  double kappa = 1.0;
  double flux = 0.0;
  double defect = 1.0;               // J
  std::string sweep_j;               // "lo:hi:steps", empty = no sweep
  std::string sweep_phi;
  std::string size_list;             // "8,16,32" for ipr-scaling
  std::optional<double> tol_imag;    // empty: per-matrix default
  std::string out = "-";             // "-" = stdout
  std::string format = "csv";        // csv | json
  int workers = 1;
  std::string only;                  // verify suite filter
};

/// Dispatches one command and maps failures onto the exit-code contract.
/// Output is assembled in grid order before writing, so bytes are identical
/// for any worker count.
int run(const RunConfig& config);

}  // namespace nhspec::cli
