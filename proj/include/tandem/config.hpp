#pragma once

// Experiment configuration and its flat `key = value` text form, plus the
// number formatting shared by every CSV writer.

#include <cstdint>
#include <string>
#include <vector>

#include "tandem/fixed_sample.hpp"

namespace tandem {

struct Sweep {
  double start = 0.5;
  double stop = 2.0;
  std::size_t count = 16;

  std::vector<double> values() const;
  friend bool operator==(const Sweep&, const Sweep&) = default;
};

/// Parses "start:stop:count"; count >= 1, and start == stop when count == 1.
Sweep parse_sweep(const std::string& text);
std::string format_sweep(const Sweep& sweep);

enum class Command { Fig3, Fig4, Validate, Mif, Multisensor, Eval };

const char* to_string(Command c);
Command parse_command(const std::string& text);

struct ExperimentConfig {
  Command command = Command::Fig3;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  std::vector<double> sigma_ys{1.0, 1.0};  ///< multisensor peripheral scales
  double alpha = 0.2;
  Sweep sweep;                              ///< sigma_x sweep (fig3, fig4)
  std::vector<int> n_steps{3, 5};           ///< MIF schedules
  std::uint64_t seed = 20261016;
  std::uint64_t trials = 1000000;
  std::uint64_t exponent_n = 2000;
  std::uint64_t exponent_trials = 200;
  SearchConfig search;
  IterConfig iter;
  std::string out;  ///< empty: standard output

  /// Throws InvalidArgument for out-of-range values.
  void validate() const;
};

/// Lossless text form; parse(to_text(c)) reproduces c.
std::string to_config_text(const ExperimentConfig& config);

/// Applies the keys found in `text` on top of `base`. Blank lines and lines
/// starting with '#' are ignored; unknown keys and malformed values throw
/// InvalidArgument.
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});

ExperimentConfig read_config_file(const std::string& path, ExperimentConfig base = {});

/// Sets one key from its text value (used by both the file parser and flags).
void apply_config_key(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Shortest decimal string that reads back to the same double; "inf",
/// "-inf", "nan" for non-finite values.
std::string format_double(double value);

double parse_double(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace tandem
