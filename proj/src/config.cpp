#include "fdrelay/cli/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <string>

#include "fdrelay/error.hpp"

namespace fdrelay::cli {

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 7> kCommands = {{
    {Command::outage, "outage"},
    {Command::ser, "ser"},
    {Command::optimize_location, "optimize-location"},
    {Command::optimize_power, "optimize-power"},
    {Command::optimize_joint, "optimize-joint"},
    {Command::figure, "figure"},
    {Command::validate, "validate"},
}};

constexpr std::array<std::string_view, 6> kSweepable = {
    "total_power_db", "rsi_level", "pathloss_exp", "rho_lambda", "rho_d", "threshold"};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::string_view where, std::string_view key, std::string_view why) {
  std::string msg(where);
  msg += ": field '";
  msg += key;
  msg += "': ";
  msg += why;
  throw ConfigError(msg);
}

double to_double(std::string_view where, std::string_view key, std::string_view text) {
  text = trim(text);
  double out = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    fail(where, key, "expected a finite number, got '" + std::string(text) + "'");
  }
  return out;
}

std::uint64_t to_count(std::string_view where, std::string_view key, std::string_view text) {
  const double v = to_double(where, key, text);
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19) {
    fail(where, key, "expected a nonnegative integer, got '" + std::string(trim(text)) + "'");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [cmd, text] : kCommands) {
    if (text == name) return cmd;
  }
  return std::nullopt;
}

std::string_view to_string(Command c) {
  for (const auto& [cmd, text] : kCommands) {
    if (cmd == c) return text;
  }
  return "unknown";
}

std::vector<double> Sweep::points() const {
  if (step == 0.0 || !std::isfinite(step)) throw ConfigError("sweep: step must be nonzero");
  const double span = (stop - start) / step;
  if (span < -1e-9) throw ConfigError("sweep: range is empty for the given step direction");
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

Sweep parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("sweep: expected name=start:stop:step, got '" + std::string(text) + "'");
  }
  Sweep s;
  s.variable = std::string(trim(text.substr(0, eq)));
  bool known = false;
  for (auto k : kSweepable) known = known || k == s.variable;
  if (!known) throw ConfigError("sweep: variable '" + s.variable + "' cannot be swept");
  std::string_view range = text.substr(eq + 1);
  std::array<double, 3> parts{};
  for (int i = 0; i < 3; ++i) {
    const auto colon = range.find(':');
    if ((i < 2) == (colon == std::string_view::npos)) {
      throw ConfigError("sweep: expected start:stop:step, got '" + std::string(text) + "'");
    }
    parts[i] = to_double("sweep", s.variable, range.substr(0, colon));
    if (i < 2) range = range.substr(colon + 1);
  }
  s.start = parts[0];
  s.stop = parts[1];
  s.step = parts[2];
  (void)s.points();  // rejects empty ranges now
  return s;
}

SystemConfig ExperimentSpec::scenario() const {
  SystemConfig cfg = config;
  cfg.total_power = db_to_linear(total_power_db);
  return cfg;
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "total_power_db", "rsi_level", "pathloss_exp", "sum_distance", "direct_distance",
      "rho_lambda",     "rho_d",     "modulation",   "mc_samples",   "seed",
      "threshold",      "sweep"};
  return keys;
}

void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value,
                   std::string_view where) {
  key = trim(key);
  value = trim(value);
  if (key == "total_power_db") {
    spec.total_power_db = to_double(where, key, value);
  } else if (key == "rsi_level") {
    const double v = to_double(where, key, value);
    if (v < 0.0) fail(where, key, "must be nonnegative");
    spec.config.rsi_level = v;
  } else if (key == "pathloss_exp") {
    const double v = to_double(where, key, value);
    if (!(v > 1.0)) fail(where, key, "must exceed 1");
    spec.config.pathloss_exp = v;
  } else if (key == "sum_distance") {
    const double v = to_double(where, key, value);
    if (!(v > 0.0)) fail(where, key, "must be positive");
    spec.config.sum_distance = v;
  } else if (key == "direct_distance") {
    const double v = to_double(where, key, value);
    if (!(v > 0.0)) fail(where, key, "must be positive");
    spec.config.direct_distance = v;
  } else if (key == "rho_lambda" || key == "rho_d") {
    const double v = to_double(where, key, value);
    if (!(v > 0.0 && v < 1.0)) fail(where, key, "must lie in (0, 1)");
    (key == "rho_lambda" ? spec.rho_lambda : spec.rho_d) = v;
  } else if (key == "modulation") {
    if (value != "bpsk") fail(where, key, "unsupported modulation '" + std::string(value) + "'");
    spec.config.modulation = Modulation::bpsk();
  } else if (key == "mc_samples") {
    spec.mc_samples = to_count(where, key, value);
  } else if (key == "seed") {
    spec.seed = to_count(where, key, value);
  } else if (key == "threshold") {
    const double v = to_double(where, key, value);
    if (v < 0.0) fail(where, key, "must be nonnegative");
    spec.threshold = v;
  } else if (key == "sweep") {
    try {
      spec.sweep = parse_sweep(value);
    } catch (const ConfigError& e) {
      fail(where, key, e.what());
    }
  } else {
    std::string msg(where);
    msg += ": unknown key '";
    msg += key;
    msg += "'";
    throw ConfigError(msg);
  }
}

void load_config(ExperimentSpec& spec, std::istream& in, std::string_view source_name) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    apply_setting(spec, text.substr(0, eq), text.substr(eq + 1), where);
  }
}

}  // namespace fdrelay::cli
