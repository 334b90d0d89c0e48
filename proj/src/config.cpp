#include "tandem/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tandem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw InvalidArgument("invalid value for '" + key + "': '" + value + "'");
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(key, text);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_value(key, text);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

constexpr std::array<const char*, 6> kCommandNames = {"fig3", "fig4",        "validate",
                                                      "mif",  "multisensor", "eval"};

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) out.push_back(parse_double(part));
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

std::vector<double> Sweep::values() const { return linspace(start, stop, count); }

Sweep parse_sweep(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) throw InvalidArgument("sweep must be start:stop:count (got '" + text + "')");
  Sweep s{parse_double(parts[0]), parse_double(parts[1]),
          parse_int<std::size_t>("sweep", parts[2])};
  if (s.count == 0 || !std::isfinite(s.start) || !std::isfinite(s.stop) || s.stop < s.start ||
      (s.count == 1 && s.start != s.stop)) {
    throw InvalidArgument("invalid sweep '" + text + "'");
  }
  return s;
}

std::string format_sweep(const Sweep& sweep) {
  return format_double(sweep.start) + ":" + format_double(sweep.stop) + ":" +
         std::to_string(sweep.count);
}

const char* to_string(Command c) { return kCommandNames[static_cast<std::size_t>(c)]; }

Command parse_command(const std::string& text) {
  for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
    if (text == kCommandNames[i]) return static_cast<Command>(i);
  }
  throw InvalidArgument("unknown command '" + text + "'");
}

void ExperimentConfig::validate() const {
  checked_sigma(sigma_x, "sigma_x");
  checked_sigma(sigma_y, "sigma_y");
  checked_alpha(alpha);
  if (sigma_ys.empty() || sigma_ys.size() > 3) throw InvalidArgument("sigma_ys needs 1 to 3 entries");
  for (double s : sigma_ys) checked_sigma(s, "sigma_ys");
  if (sweep.start <= 0.0) throw InvalidArgument("sweep values are noise scales and must be positive");
  for (int n : n_steps) {
    if (n < 3 || n > 7 || n % 2 == 0) throw InvalidArgument("n_steps entries must be 3, 5 or 7");
  }
  if (n_steps.empty()) throw InvalidArgument("n_steps is empty");
  if (trials == 0 || exponent_n == 0 || exponent_trials == 0) {
    throw InvalidArgument("trial counts must be positive");
  }
  if (search.grid_points < 2) throw InvalidArgument("grid_points must be at least 2");
  if (!(search.span_sigmas > 0.0)) throw InvalidArgument("span_sigmas must be positive");
  if (!(search.refine_tol > 0.0)) throw InvalidArgument("refine_tol must be positive");
  if (!(iter.damping >= 0.0 && iter.damping < 1.0)) throw InvalidArgument("damping must lie in [0, 1)");
  if (iter.max_steps < 1) throw InvalidArgument("max_steps must be positive");
  if (!(iter.tolerance > 0.0)) throw InvalidArgument("tol must be positive");
}

void apply_config_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "command") {
      c.command = parse_command(value);
    } else if (key == "sigma_x") {
      c.sigma_x = parse_double(value);
    } else if (key == "sigma_y") {
      c.sigma_y = parse_double(value);
    } else if (key == "sigma_ys") {
      c.sigma_ys = parse_double_list(value);
    } else if (key == "alpha") {
      c.alpha = parse_double(value);
    } else if (key == "sweep") {
      c.sweep = parse_sweep(value);
    } else if (key == "n_steps") {
      c.n_steps.clear();
      for (const std::string& p : split(value, ',')) c.n_steps.push_back(parse_int<int>(key, p));
    } else if (key == "seed") {
      c.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "trials") {
      c.trials = parse_int<std::uint64_t>(key, value);
    } else if (key == "exponent_n") {
      c.exponent_n = parse_int<std::uint64_t>(key, value);
    } else if (key == "exponent_trials") {
      c.exponent_trials = parse_int<std::uint64_t>(key, value);
    } else if (key == "grid_points") {
      c.search.grid_points = parse_int<std::size_t>(key, value);
    } else if (key == "span_sigmas") {
      c.search.span_sigmas = parse_double(value);
    } else if (key == "include_infinite") {
      c.search.include_infinite = parse_bool(key, value);
    } else if (key == "refine_starts") {
      c.search.refine_starts = parse_int<std::size_t>(key, value);
    } else if (key == "refine_sweeps") {
      c.search.refine_sweeps = parse_int<int>(key, value);
    } else if (key == "refine_tol") {
      c.search.refine_tol = parse_double(value);
    } else if (key == "parallel") {
      c.search.parallel = parse_bool(key, value);
    } else if (key == "damping") {
      c.iter.damping = parse_double(value);
    } else if (key == "max_steps") {
      c.iter.max_steps = parse_int<int>(key, value);
    } else if (key == "tol") {
      c.iter.tolerance = parse_double(value);
    } else if (key == "out") {
      c.out = value;
    } else {
      throw InvalidArgument("unknown configuration key '" + key + "'");
    }
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    if (what.rfind("invalid value", 0) == 0 || what.rfind("unknown configuration", 0) == 0) throw;
    throw InvalidArgument("invalid value for '" + key + "': " + what);
  }
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  std::string n_steps;
  for (std::size_t i = 0; i < c.n_steps.size(); ++i) {
    n_steps += (i ? "," : "") + std::to_string(c.n_steps[i]);
  }
  os << "command = " << to_string(c.command) << "\n"
     << "sigma_x = " << format_double(c.sigma_x) << "\n"
     << "sigma_y = " << format_double(c.sigma_y) << "\n"
     << "sigma_ys = " << join(c.sigma_ys) << "\n"
     << "alpha = " << format_double(c.alpha) << "\n"
     << "sweep = " << format_sweep(c.sweep) << "\n"
     << "n_steps = " << n_steps << "\n"
     << "seed = " << c.seed << "\n"
     << "trials = " << c.trials << "\n"
     << "exponent_n = " << c.exponent_n << "\n"
     << "exponent_trials = " << c.exponent_trials << "\n"
     << "grid_points = " << c.search.grid_points << "\n"
     << "span_sigmas = " << format_double(c.search.span_sigmas) << "\n"
     << "include_infinite = " << (c.search.include_infinite ? "true" : "false") << "\n"
     << "refine_starts = " << c.search.refine_starts << "\n"
     << "refine_sweeps = " << c.search.refine_sweeps << "\n"
     << "refine_tol = " << format_double(c.search.refine_tol) << "\n"
     << "parallel = " << (c.search.parallel ? "true" : "false") << "\n"
     << "damping = " << format_double(c.iter.damping) << "\n"
     << "max_steps = " << c.iter.max_steps << "\n"
     << "tol = " << format_double(c.iter.tolerance) << "\n"
     << "out = " << c.out << "\n";
  return os.str();
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(number) + ": expected key = value");
    }
    apply_config_key(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig read_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

}  // namespace tandem
