// tandem: command-line front end. Flags override keys read from --config.
// Exit status: 0 success, 1 validation failure, 2 configuration error.

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tandem/commands.hpp"
#include "tandem/config.hpp"

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kCommonFlags[] = {
    {"--sigma-x", "sigma_x", "noise std-dev at sensor X"},
    {"--sigma-y", "sigma_y", "noise std-dev at sensor Y"},
    {"--alpha", "alpha", "false-alarm constraint"},
    {"--sweep", "sweep", "sigma_x sweep start:stop:count"},
    {"--seed", "seed", "Monte-Carlo seed"},
    {"--trials", "trials", "Monte-Carlo trials per rate"},
    {"--out", "out", "output CSV path (default: stdout)"},
    {"--grid-points", "grid_points", "first-stage threshold grid size"},
    {"--tol", "tol", "fixed-point iteration tolerance"},
    {"--n-steps", "n_steps", "MIF schedule lengths, e.g. 3,5"},
    {"--sigma-ys", "sigma_ys", "peripheral noise std-devs, e.g. 1,1"},
    {"--exponent-n", "exponent_n", "samples per exponent trial"},
    {"--exponent-trials", "exponent_trials", "exponent trials"},
    {"--serial", "parallel", "disable OpenMP kernels"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive tandem fusion: optimal rules, error exponents, Monte-Carlo checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> serial_flags;
  std::vector<std::pair<CLI::App*, tandem::Command>> subs;

  const std::pair<const char*, const char*> commands[] = {
      {"fig3", "pd of YX, XYX and centralized fusion over a sigma_x sweep"},
      {"fig4", "maximal KL exponents with the final decision at X or Y"},
      {"validate", "Monte-Carlo check of analytic rates and exponents"},
      {"mif", "multi-step interactive fusion versus one-way YX"},
      {"multisensor", "K peripheral sensors with and without a first X bit"},
      {"eval", "operating points and exponents at one (sigma_x, sigma_y)"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file");
    for (const FlagSpec& f : kCommonFlags) {
      if (std::string(f.key) == "parallel") {
        sub->add_flag(f.flag, serial_flags[name], f.help);
      } else {
        sub->add_option(f.flag, values[std::string(name) + "|" + f.key], f.help);
      }
    }
    subs.emplace_back(sub, tandem::parse_command(name));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  tandem::ExperimentConfig config;
  try {
    CLI::App* chosen = nullptr;
    for (const auto& [sub, command] : subs) {
      if (sub->parsed()) {
        chosen = sub;
        if (!config_path.empty()) config = tandem::read_config_file(config_path);
        config.command = command;
      }
    }
    const std::string name = chosen->get_name();
    for (const FlagSpec& f : kCommonFlags) {
      if (std::string(f.key) == "parallel") {
        if (serial_flags[name]) config.search.parallel = false;
        continue;
      }
      if (chosen->count(f.flag) > 0) {
        tandem::apply_config_key(config, f.key, values[name + "|" + f.key]);
      }
    }
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  try {
    const tandem::CommandOutput result = tandem::run_command(config);
    tandem::write_output(config, result.csv);
    return result.exit_code;
  } catch (const tandem::InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
