#pragma once

// The CLI subcommands as library functions: each turns a configuration into
// CSV text and an exit status (0 success, 1 validation failure).

#include <string>

#include "tandem/config.hpp"

namespace tandem {

struct CommandOutput {
  std::string csv;
  int exit_code = 0;
};

/// sigma_x,pd_yx,pd_xyx,pd_centralized,pf_residual_yx,pf_residual_xyx,status
CommandOutput cmd_fig3(const ExperimentConfig& config);

/// sigma_x,k_yx,k_xyx,k_xy,k_yxy
CommandOutput cmd_fig4(const ExperimentConfig& config);

/// check_name,analytic,mc_value,half_width,pass
CommandOutput cmd_validate(const ExperimentConfig& config);

/// n_steps,k_mif_max,k_yx_max,gap
CommandOutput cmd_mif(const ExperimentConfig& config);

/// k,sigma_x,sigma_ys,k_vecyx,k_xvecyx,gap
CommandOutput cmd_multisensor(const ExperimentConfig& config);

/// arch,sigma_x,sigma_y,alpha,pf,pd,lambda,k_max
CommandOutput cmd_eval(const ExperimentConfig& config);

/// Validates the configuration and dispatches on config.command.
CommandOutput run_command(const ExperimentConfig& config);

/// Writes to config.out, or standard output when it is empty. Throws
/// std::runtime_error when the file cannot be written.
void write_output(const ExperimentConfig& config, const std::string& text);

}  // namespace tandem
