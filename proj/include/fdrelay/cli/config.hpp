#pragma once

// Experiment description shared by the config-file reader and the command
// line. Both feed the same apply_setting(), so every config key has exactly
// one matching flag.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdrelay/model.hpp"

namespace fdrelay::cli {

enum class Command {
  outage,
  ser,
  optimize_location,
  optimize_power,
  optimize_joint,
  figure,
  validate
};

enum class RunMode { analytic, mc, both };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command c);

/// Inclusive arithmetic range over one scenario variable.
struct Sweep {
  std::string variable;  // a sweepable config key, e.g. total_power_db
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> points() const;
};

/// Parses "name=start:stop:step". Throws ConfigError.
Sweep parse_sweep(std::string_view text);

struct ExperimentSpec {
  Command command = Command::ser;
  int figure = 0;
  std::optional<Sweep> sweep;

  double total_power_db = 20.0;
  SystemConfig config = [] {
    SystemConfig c;
    c.rsi_level = 0.1;
    return c;
  }();
  double rho_lambda = 0.5;
  double rho_d = 0.5;
  double threshold = 1.0;  // linear SINR threshold for outage

  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  RunMode mode = RunMode::both;
  std::string output_path;  // empty: stdout

  Allocation allocation() const { return Allocation(rho_lambda, rho_d); }
  /// Config with total_power taken from total_power_db.
  SystemConfig scenario() const;
};

/// Sets one key. `where` prefixes error messages (e.g. "run.cfg:7" or
/// "--rsi-level"). Throws ConfigError naming the field.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value,
                   std::string_view where);

/// Reads "key = value" lines; '#' starts a comment. Throws ConfigError with
/// source:line diagnostics.
void load_config(ExperimentSpec& spec, std::istream& in, std::string_view source_name);

/// Every key accepted by apply_setting.
const std::vector<std::string_view>& config_keys();

}  // namespace fdrelay::cli
