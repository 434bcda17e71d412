#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nhspec/cli.hpp"

namespace {

int default_workers() {
  if (const char* env = std::getenv("NHSPEC_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed NHSPEC_THREADS='" << env << "'\n";
    }
  }
  return 1;
}

/// Flat key=value configuration file. Keys are the long flag names without
/// the dashes; command-line flags win over file keys.
struct ConfigBindings {
  struct Binding {
    CLI::Option* option = nullptr;
    std::function<void(const std::string&)> apply;
  };
  std::map<std::string, Binding> by_key;

  void bind(CLI::Option* option, const std::string& key,
            std::function<void(const std::string&)> apply) {
    by_key[key] = {option, std::move(apply)};
  }
};

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  std::string value = text.substr(begin, end - begin + 1);
  if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                            (value.front() == '\'' && value.back() == '\''))) {
    value = value.substr(1, value.size() - 2);
  }
  return value;
}

void apply_config_file(const std::string& path,
                       const ConfigBindings& bindings) {
  std::ifstream file(path);
  if (!file) {
    throw nhspec::cli::ConfigError("cannot read config file '" + path + "'");
  }
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    const auto equals = stripped.find('=');
    if (equals == std::string::npos) {
      throw nhspec::cli::ConfigError(path + ":" +
                                     std::to_string(line_number) +
                                     ": expected key=value");
    }
    const std::string key = trim(stripped.substr(0, equals));
    const std::string value = trim(stripped.substr(equals + 1));
    const auto found = bindings.by_key.find(key);
    if (found == bindings.by_key.end()) {
      throw nhspec::cli::ConfigError(path + ":" +
                                     std::to_string(line_number) +
                                     ": unknown key '" + key + "'");
    }
    if (found->second.option->count() > 0) continue;  // flag wins
    try {
      found->second.apply(value);
    } catch (const std::exception&) {
      throw nhspec::cli::ConfigError(path + ":" +
                                     std::to_string(line_number) +
                                     ": bad value '" + value + "' for '" +
                                     key + "'");
    }
  }
}

double to_double(const std::string& text) {
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("trailing characters");
  return value;
}

int to_int(const std::string& text) {
  std::size_t used = 0;
  const int value = std::stoi(text, &used);
  if (used != text.size()) throw std::invalid_argument("trailing characters");
  return value;
}

void add_model_options(CLI::App* cmd, nhspec::cli::RunConfig& config,
                       ConfigBindings& bindings) {
  bindings.bind(cmd->add_option("--model", config.model,
                                "ring | flux-ring | chain | defect-ring"),
                "model", [&config](const std::string& v) { config.model = v; });
  bindings.bind(cmd->add_option("--size", config.size,
                                "number of lattice sites N"),
                "size",
                [&config](const std::string& v) { config.size = to_int(v); });
  bindings.bind(cmd->add_option("--alpha", config.alpha, "forward coupling"),
                "alpha",
                [&config](const std::string& v) { config.alpha = to_double(v); });
  bindings.bind(cmd->add_option("--beta", config.beta, "backward coupling"),
                "beta",
                [&config](const std::string& v) { config.beta = to_double(v); });
  bindings.bind(cmd->add_option("--kappa", config.kappa, "flux-ring coupling"),
                "kappa",
                [&config](const std::string& v) { config.kappa = to_double(v); });
  bindings.bind(cmd->add_option("--flux", config.flux,
                                "real flux per bond (flux ring)"),
                "flux",
                [&config](const std::string& v) { config.flux = to_double(v); });
  bindings.bind(cmd->add_option("--J", config.defect,
                                "corner-bond scale (defect ring)"),
                "J",
                [&config](const std::string& v) { config.defect = to_double(v); });
}

void add_sweep_options(CLI::App* cmd, nhspec::cli::RunConfig& config,
                       ConfigBindings& bindings, bool required) {
  CLI::Option* sweep_j =
      cmd->add_option("--sweep-J", config.sweep_j, "defect grid lo:hi:steps");
  CLI::Option* sweep_phi = cmd->add_option("--sweep-phi", config.sweep_phi,
                                           "gauge grid lo:hi:steps");
  if (required) {
    sweep_j->required();
    sweep_phi->required();
  }
  bindings.bind(sweep_j, "sweep-J",
                [&config](const std::string& v) { config.sweep_j = v; });
  bindings.bind(sweep_phi, "sweep-phi",
                [&config](const std::string& v) { config.sweep_phi = v; });
}

void add_output_options(CLI::App* cmd, nhspec::cli::RunConfig& config,
                        ConfigBindings& bindings, std::string& config_path) {
  bindings.bind(
      cmd->add_option("--tol-imag", config.tol_imag,
                      "imaginary-part tolerance (default 1e-9 max(1, ||H||))"),
      "tol-imag",
      [&config](const std::string& v) { config.tol_imag = to_double(v); });
  bindings.bind(cmd->add_option("--out", config.out,
                                "output path, '-' for stdout"),
                "out", [&config](const std::string& v) { config.out = v; });
  bindings.bind(cmd->add_option("--format", config.format, "csv | json"),
                "format",
                [&config](const std::string& v) { config.format = v; });
  bindings.bind(cmd->add_option("--threads", config.workers,
                                "worker threads (default NHSPEC_THREADS or 1)"),
                "threads",
                [&config](const std::string& v) { config.workers = to_int(v); });
  cmd->add_option("--config", config_path,
                  "flat key=value configuration file");
}

}  // namespace

int main(int argc, char** argv) {
  nhspec::cli::RunConfig config;
  config.workers = default_workers();
  std::map<CLI::App*, ConfigBindings> registry;
  std::string config_path;

  CLI::App app{
      "nhspec: spectra, phase diagrams and skin-effect localization for "
      "one-dimensional lattices with asymmetric coupling"};
  app.require_subcommand(1);

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "eigenvalues of one model, closed form beside the solver");
  add_model_options(spectrum, config, registry[spectrum]);
  add_sweep_options(spectrum, config, registry[spectrum], false);
  add_output_options(spectrum, config, registry[spectrum], config_path);

  CLI::App* eigenstates = app.add_subcommand(
      "eigenstates", "open-chain modes: amplitudes, norms, distributions");
  add_model_options(eigenstates, config, registry[eigenstates]);
  add_output_options(eigenstates, config, registry[eigenstates], config_path);

  CLI::App* phase = app.add_subcommand(
      "phase-diagram",
      "real/complex classification of the defect ring over a (J, phi) grid");
  add_model_options(phase, config, registry[phase]);
  add_sweep_options(phase, config, registry[phase], true);
  add_output_options(phase, config, registry[phase], config_path);

  CLI::App* scaling = app.add_subcommand(
      "ipr-scaling", "averaged IPR against system size and asymmetry");
  registry[scaling].bind(
      scaling
          ->add_option("--N-list", config.size_list,
                       "comma-separated sizes, e.g. 8,16,32")
          ->required(),
      "N-list", [&config](const std::string& v) { config.size_list = v; });
  {
    CLI::Option* sweep_phi = scaling->add_option(
        "--sweep-phi", config.sweep_phi, "gauge values lo:hi:steps");
    sweep_phi->required();
    registry[scaling].bind(sweep_phi, "sweep-phi",
                           [&config](const std::string& v) {
                             config.sweep_phi = v;
                           });
  }
  add_output_options(scaling, config, registry[scaling], config_path);

  CLI::App* verify = app.add_subcommand(
      "verify", "run the invariant suites and report pass/fail per suite");
  registry[verify].bind(verify->add_option("--only", config.only,
                                           "substring filter on suite names"),
                        "only",
                        [&config](const std::string& v) { config.only = v; });
  add_output_options(verify, config, registry[verify], config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : nhspec::cli::kConfigError;
  }

  CLI::App* parsed = nullptr;
  for (CLI::App* cmd : {spectrum, eigenstates, phase, scaling, verify}) {
    if (cmd->parsed()) {
      parsed = cmd;
      config.command = cmd->get_name();
      break;
    }
  }

  if (!config_path.empty() && parsed != nullptr) {
    try {
      apply_config_file(config_path, registry[parsed]);
    } catch (const nhspec::cli::ConfigError& error) {
      std::cerr << "config error: " << error.what() << '\n';
      return nhspec::cli::kConfigError;
    }
  }
  return nhspec::cli::run(config);
}
