#include "fdrelay/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "fdrelay/analytic.hpp"
#include "fdrelay/error.hpp"
#include "fdrelay/mc.hpp"
#include "fdrelay/opt.hpp"

namespace fdrelay::cli {

namespace {

using Row = std::vector<std::string>;

std::string cell(std::optional<double> x) { return x ? format_number(*x) : std::string(); }

struct Table {
  Row header;
  std::vector<Row> rows;

  std::string render() const {
    std::string out;
    auto append = [&](const Row& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += r[i];
      }
      out += '\n';
    };
    append(header);
    for (const auto& r : rows) append(r);
    return out;
  }
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Evaluates fn(i, mc_threads) for every point, in parallel across points when
// there are enough of them; results stay in point order.
std::vector<Row> map_points(std::size_t n, unsigned threads,
                            const std::function<Row(std::size_t, unsigned)>& fn) {
  std::vector<Row> rows(n);
  const unsigned total = resolve_threads(threads);
  if (n < total || total == 1) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = fn(i, total);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n && !failed; i = next.fetch_add(1)) {
      try {
        rows[i] = fn(i, 1);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < total; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string column_name(std::string_view key) {
  return key == "total_power_db" ? std::string("p_db") : std::string(key);
}

// Leading column value for a point.
double column_value(const ExperimentSpec& s, std::string_view key) {
  if (key == "total_power_db") return s.total_power_db;
  if (key == "rsi_level") return s.config.rsi_level;
  if (key == "pathloss_exp") return s.config.pathloss_exp;
  if (key == "rho_lambda") return s.rho_lambda;
  if (key == "rho_d") return s.rho_d;
  if (key == "threshold") return s.threshold;
  throw ConfigError("no column for '" + std::string(key) + "'");
}

ExperimentSpec at_point(const ExperimentSpec& base, std::string_view key, double value) {
  ExperimentSpec s = base;
  apply_setting(s, key, format_number(value), "sweep");
  return s;
}

mc::McOptions mc_options(const ExperimentSpec& s, unsigned threads) {
  return {s.mc_samples, s.seed, threads};
}

bool want_analytic(const ExperimentSpec& s) { return s.mode != RunMode::mc; }
bool want_mc(const ExperimentSpec& s) { return s.mode != RunMode::analytic; }

// ---- single-scenario commands -------------------------------------------

struct CommandTable {
  Row columns;  // after the leading column
  std::function<Row(const ExperimentSpec&, unsigned)> row;
};

CommandTable outage_table() {
  return {{"threshold", "outage_asymptotic", "outage_exact", "outage_mc", "outage_mc_stderr"},
          [](const ExperimentSpec& s, unsigned threads) -> Row {
            const auto cfg = s.scenario();
            const auto stats = link_stats(cfg, s.allocation());
            std::optional<double> asym, exact;
            std::optional<mc::McEstimate> est;
            if (want_analytic(s)) {
              asym = analytic::outage(s.threshold, stats, analytic::CdfMode::asymptotic);
              exact = analytic::outage(s.threshold, stats, analytic::CdfMode::exact);
            }
            if (want_mc(s)) est = mc::estimate_outage(stats, s.threshold, mc_options(s, threads));
            return {format_number(s.threshold), cell(asym), cell(exact),
                    cell(est ? std::optional(est->value) : std::nullopt),
                    cell(est ? std::optional(est->std_error) : std::nullopt)};
          }};
}

CommandTable ser_table() {
  return {{"ser_series", "ser_quadrature", "ser_mc", "ser_mc_stderr", "ser_floor"},
          [](const ExperimentSpec& s, unsigned threads) -> Row {
            const auto cfg = s.scenario();
            const auto alloc = s.allocation();
            const auto stats = link_stats(cfg, alloc);
            std::optional<double> series, quad, floor;
            std::optional<mc::McEstimate> est;
            if (want_analytic(s)) {
              series = analytic::ser_series(stats, cfg.modulation);
              quad = analytic::ser_quadrature(stats, cfg.modulation);
              floor = analytic::ser_floor(alloc, cfg);
            }
            if (want_mc(s)) {
              est = mc::estimate_ser_semianalytic(stats, cfg.modulation, mc_options(s, threads));
            }
            return {cell(series), cell(quad), cell(est ? std::optional(est->value) : std::nullopt),
                    cell(est ? std::optional(est->std_error) : std::nullopt), cell(floor)};
          }};
}

CommandTable optimize_1d_table(opt::Objective objective) {
  const bool loc = objective == opt::Objective::location;
  Row cols = loc ? Row{"rho_lambda", "rho_d_closed", "ser_closed", "rho_d_golden", "ser_golden",
                       "ser_location_formula"}
                 : Row{"rho_d", "rho_lambda_closed", "ser_closed", "rho_lambda_golden",
                       "ser_golden", "ser_power_formula"};
  return {cols, [objective, loc](const ExperimentSpec& s, unsigned) -> Row {
            const auto cfg = s.scenario();
            const double fixed = loc ? s.rho_lambda : s.rho_d;
            const auto closed = opt::closed_form_1d(objective, cfg, fixed);
            const auto golden = opt::minimize_1d(objective, cfg, fixed);
            auto free_of = [loc](const opt::OptResult& r) {
              return loc ? r.allocation.rho_d() : r.allocation.rho_lambda();
            };
            const double formula = loc ? analytic::ser_location_optimized(cfg, fixed)
                                       : analytic::ser_power_optimized(cfg, fixed);
            return {format_number(fixed),        format_number(free_of(closed)),
                    format_number(closed.ser),   format_number(free_of(golden)),
                    format_number(golden.ser),   format_number(formula)};
          }};
}

CommandTable optimize_joint_table() {
  return {{"rho_lambda", "rho_d", "ser", "foc_residual", "method"},
          [](const ExperimentSpec& s, unsigned) -> Row {
            const auto best = opt::select_joint_optimum(s.scenario());
            return {format_number(best.allocation.rho_lambda()),
                    format_number(best.allocation.rho_d()), format_number(best.ser),
                    format_number(best.foc_residual), std::string(opt::to_string(best.method))};
          }};
}

Table run_single(const ExperimentSpec& spec, const CommandTable& table) {
  const std::string key = spec.sweep ? spec.sweep->variable : std::string("total_power_db");
  const std::string lead = column_name(key);
  std::vector<double> values =
      spec.sweep ? spec.sweep->points() : std::vector<double>{column_value(spec, key)};

  // A command column equal to the leading one is dropped rather than repeated.
  std::vector<std::size_t> keep;
  Table t;
  t.header.push_back(lead);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i] == lead) continue;
    keep.push_back(i);
    t.header.push_back(table.columns[i]);
  }
  t.rows = map_points(values.size(), spec.threads, [&](std::size_t i, unsigned threads) {
    const auto point = at_point(spec, key, values[i]);
    const Row full = table.row(point, threads);
    Row r{format_number(column_value(point, key))};
    for (auto k : keep) r.push_back(full[k]);
    return r;
  });
  return t;
}

// ---- figures --------------------------------------------------------------

std::vector<double> arange(double start, double stop, double step) {
  return Sweep{"", start, stop, step}.points();
}

std::vector<double> power_axis(const ExperimentSpec& spec, double stop_db) {
  if (spec.sweep && spec.sweep->variable == "total_power_db") return spec.sweep->points();
  return arange(0.0, stop_db, 5.0);
}

ExperimentSpec with(const ExperimentSpec& base, double p_db, double rsi) {
  ExperimentSpec s = base;
  s.total_power_db = p_db;
  s.config.rsi_level = rsi;
  return s;
}

struct GridPoint {
  double rsi;
  double x;
};

std::vector<GridPoint> rsi_cross(const std::vector<double>& xs) {
  std::vector<GridPoint> out;
  for (double rsi : kFigureRsiGrid) {
    for (double x : xs) out.push_back({rsi, x});
  }
  return out;
}

std::optional<mc::McEstimate> ser_mc(const ExperimentSpec& s, const Allocation& alloc,
                                     unsigned threads) {
  if (!want_mc(s)) return std::nullopt;
  const auto cfg = s.scenario();
  return mc::estimate_ser_semianalytic(link_stats(cfg, alloc), cfg.modulation,
                                       mc_options(s, threads));
}

std::optional<double> ser_an(const ExperimentSpec& s, const Allocation& alloc) {
  if (!want_analytic(s)) return std::nullopt;
  const auto cfg = s.scenario();
  return analytic::ser_series(link_stats(cfg, alloc), cfg.modulation);
}

std::string mc_value(const std::optional<mc::McEstimate>& e) {
  return cell(e ? std::optional(e->value) : std::nullopt);
}
std::string mc_stderr(const std::optional<mc::McEstimate>& e) {
  return cell(e ? std::optional(e->std_error) : std::nullopt);
}

// Outage and SER against total power for each RSI level.
Table figure_performance(const ExperimentSpec& spec) {
  const auto pts = rsi_cross(power_axis(spec, 40.0));
  Table t{{"rsi_level", "p_db", "outage_asymptotic", "outage_exact", "outage_mc", "ser_series",
           "ser_mc", "ser_mc_stderr"},
          {}};
  t.rows = map_points(pts.size(), spec.threads, [&](std::size_t i, unsigned threads) -> Row {
    const auto s = with(spec, pts[i].x, pts[i].rsi);
    const auto cfg = s.scenario();
    const auto stats = link_stats(cfg, s.allocation());
    std::optional<double> asym, exact;
    std::optional<mc::McEstimate> out_mc;
    if (want_analytic(s)) {
      asym = analytic::outage(s.threshold, stats, analytic::CdfMode::asymptotic);
      exact = analytic::outage(s.threshold, stats, analytic::CdfMode::exact);
    }
    if (want_mc(s)) out_mc = mc::estimate_outage(stats, s.threshold, mc_options(s, threads));
    const auto est = ser_mc(s, s.allocation(), threads);
    return {format_number(pts[i].rsi), format_number(pts[i].x), cell(asym), cell(exact),
            mc_value(out_mc), cell(ser_an(s, s.allocation())), mc_value(est), mc_stderr(est)};
  });
  return t;
}

// Optimal location for a given power split and vice versa at 10 dB.
Table figure_optimal_ratios(const ExperimentSpec& spec) {
  const auto pts = rsi_cross(arange(0.05, 0.95, 0.05));
  Table t{{"rsi_level", "ratio", "rho_d_closed", "rho_d_golden", "rho_lambda_closed",
           "rho_lambda_golden"},
          {}};
  t.rows = map_points(pts.size(), spec.threads, [&](std::size_t i, unsigned) -> Row {
    const auto cfg = with(spec, 10.0, pts[i].rsi).scenario();
    const double x = pts[i].x;
    return {format_number(pts[i].rsi),
            format_number(x),
            format_number(opt::optimal_location_closed(cfg, x)),
            format_number(opt::minimize_1d(opt::Objective::location, cfg, x).allocation.rho_d()),
            format_number(opt::optimal_power_closed(cfg, x)),
            format_number(
                opt::minimize_1d(opt::Objective::power, cfg, x).allocation.rho_lambda())};
  });
  return t;
}

// SER against one ratio with the other held at its configured value.
Table figure_ser_vs_ratio(const ExperimentSpec& spec, bool vary_location, double p_db) {
  const auto pts = rsi_cross(arange(0.02, 0.98, 0.02));
  Table t{{"rsi_level", vary_location ? "rho_d" : "rho_lambda", "ser_series", "ser_mc",
           "ser_mc_stderr"},
          {}};
  t.rows = map_points(pts.size(), spec.threads, [&](std::size_t i, unsigned threads) -> Row {
    const auto s = with(spec, p_db, pts[i].rsi);
    const Allocation alloc = vary_location ? Allocation(s.rho_lambda, pts[i].x)
                                           : Allocation(pts[i].x, s.rho_d);
    const auto est = ser_mc(s, alloc, threads);
    return {format_number(pts[i].rsi), format_number(pts[i].x), cell(ser_an(s, alloc)),
            mc_value(est), mc_stderr(est)};
  });
  return t;
}

// SER against power with and without optimizing one ratio.
Table figure_optimized_vs_power(const ExperimentSpec& spec, opt::Objective objective) {
  const bool loc = objective == opt::Objective::location;
  const auto pts = rsi_cross(power_axis(spec, 40.0));
  const std::string free = loc ? "rho_d" : "rho_lambda";
  Table t{{"rsi_level", "p_db", "ser_fixed", free + "_closed", "ser_closed", free + "_golden",
           "ser_golden", "ser_closed_mc", "ser_closed_mc_stderr"},
          {}};
  t.rows = map_points(pts.size(), spec.threads, [&](std::size_t i, unsigned threads) -> Row {
    const auto s = with(spec, pts[i].x, pts[i].rsi);
    const auto cfg = s.scenario();
    const double fixed = loc ? s.rho_lambda : s.rho_d;
    const auto closed = opt::closed_form_1d(objective, cfg, fixed);
    const auto golden = opt::minimize_1d(objective, cfg, fixed);
    auto free_of = [loc](const opt::OptResult& r) {
      return loc ? r.allocation.rho_d() : r.allocation.rho_lambda();
    };
    const auto est = ser_mc(s, closed.allocation, threads);
    return {format_number(pts[i].rsi),
            format_number(pts[i].x),
            cell(ser_an(s, s.allocation())),
            format_number(free_of(closed)),
            format_number(closed.ser),
            format_number(free_of(golden)),
            format_number(golden.ser),
            mc_value(est),
            mc_stderr(est)};
  });
  return t;
}

// Fixed, location-only, power-only and joint optimization at eps = 0.2.
Table figure_schemes(const ExperimentSpec& spec) {
  const auto powers = power_axis(spec, 60.0);
  Table t{{"p_db", "ser_fixed", "ser_location_only", "ser_power_only", "rho_lambda_joint",
           "rho_d_joint", "ser_joint", "ser_joint_mc", "ser_joint_mc_stderr"},
          {}};
  t.rows = map_points(powers.size(), spec.threads, [&](std::size_t i, unsigned threads) -> Row {
    const auto s = with(spec, powers[i], 0.2);
    const auto cfg = s.scenario();
    const auto location_only = opt::closed_form_1d(opt::Objective::location, cfg, s.rho_lambda);
    const auto power_only = opt::closed_form_1d(opt::Objective::power, cfg, s.rho_d);
    const auto joint = opt::select_joint_optimum(cfg);
    const auto est = ser_mc(s, joint.allocation, threads);
    return {format_number(powers[i]),
            cell(ser_an(s, s.allocation())),
            format_number(location_only.ser),
            format_number(power_only.ser),
            format_number(joint.allocation.rho_lambda()),
            format_number(joint.allocation.rho_d()),
            format_number(joint.ser),
            mc_value(est),
            mc_stderr(est)};
  });
  return t;
}

// FD SER against either ratio at 10 dB.
Table figure_ratio_comparison(const ExperimentSpec& spec) {
  const auto pts = rsi_cross(arange(0.05, 0.95, 0.05));
  Table t{{"rsi_level", "ratio", "ser_vs_rho_lambda", "ser_vs_rho_lambda_mc", "ser_vs_rho_d",
           "ser_vs_rho_d_mc"},
          {}};
  t.rows = map_points(pts.size(), spec.threads, [&](std::size_t i, unsigned threads) -> Row {
    const auto s = with(spec, 10.0, pts[i].rsi);
    const Allocation by_power(pts[i].x, s.rho_d);
    const Allocation by_location(s.rho_lambda, pts[i].x);
    return {format_number(pts[i].rsi),         format_number(pts[i].x),
            cell(ser_an(s, by_power)),         mc_value(ser_mc(s, by_power, threads)),
            cell(ser_an(s, by_location)),      mc_value(ser_mc(s, by_location, threads))};
  });
  return t;
}

Table run_figure(const ExperimentSpec& spec) {
  switch (spec.figure) {
    case 2:
      return figure_performance(spec);
    case 3:
      return figure_optimal_ratios(spec);
    case 4:
      return figure_ser_vs_ratio(spec, true, spec.total_power_db);
    case 5:
      return figure_ser_vs_ratio(spec, false, spec.total_power_db);
    case 6:
      return figure_optimized_vs_power(spec, opt::Objective::location);
    case 7:
      return figure_optimized_vs_power(spec, opt::Objective::power);
    case 8:
      return figure_schemes(spec);
    case 9:
      return figure_ratio_comparison(spec);
    default:
      throw ConfigError("figure: number must be between 2 and 9, got " +
                        std::to_string(spec.figure));
  }
}

// ---- validate ---------------------------------------------------------------

struct Check {
  std::string name;
  double value;
  double reference;
  double tolerance;

  bool pass() const { return std::abs(value - reference) <= tolerance; }
};

std::vector<Check> validation_checks(const ExperimentSpec& spec) {
  const auto cfg = spec.scenario();
  const auto alloc = spec.allocation();
  const auto stats = link_stats(cfg, alloc);
  const auto& mod = cfg.modulation;
  const auto opts = mc_options(spec, spec.threads);
  std::vector<Check> checks;

  // The quadrature CDF drops the "+1" of the sampled SINR, so Monte Carlo
  // comparisons against it carry a 5% band on top of the sampling error.

  const auto coeffs = analytic::approx_coeffs(3);
  const double ref[3][2] = {{1.0, 1.0}, {1.0 / 2.0, 5.0 / 3.0}, {19.0 / 72.0, 1963.0 / 855.0}};
  for (int i = 0; i < 3; ++i) {
    checks.push_back({"coeff_a" + std::to_string(i), coeffs.pairs[i].a, ref[i][0], 1e-15});
    checks.push_back({"coeff_b" + std::to_string(i), coeffs.pairs[i].b, ref[i][1], 1e-15});
  }

  for (double x : {0.5, 1.0, 2.0, 4.0}) {
    const std::string tag = "@" + format_number(x);
    const double exact = analytic::sinr_cdf_exact_numeric(x, stats);
    checks.push_back({"cdf_asymptotic_vs_exact" + tag, analytic::sinr_cdf_asymptotic(x, stats),
                      exact, analytic::cdf_gap_bound(x, stats) + 1e-9});
    const auto est = mc::estimate_outage(stats, x, opts);
    checks.push_back(
        {"outage_mc_vs_exact" + tag, est.value, exact, 4.0 * est.std_error + 0.05 * exact});
  }

  const double series = analytic::ser_series(stats, mod);
  const double quad = analytic::ser_quadrature(stats, mod);
  checks.push_back({"ser_series_vs_quadrature", series, quad, 0.01 * quad});

  const auto semi = mc::estimate_ser_semianalytic(stats, mod, opts);
  const double exact_ser = analytic::ser_from_cdf(
      [&](double x) { return analytic::sinr_cdf_exact_numeric(x, stats); }, mod);
  checks.push_back(
      {"ser_mc_vs_exact_quadrature", semi.value, exact_ser,
       4.0 * semi.std_error + 0.05 * exact_ser});
  checks.push_back(
      {"ser_series_vs_mc", series, semi.value, 3.0 * semi.std_error + 0.05 * semi.value});
  if (mod.is_bpsk()) {
    auto sym_opts = opts;
    sym_opts.n_samples = std::max(opts.n_samples, mc::kMinSymbols);
    const auto sym = mc::estimate_ser_symbol_level(stats, mod, sym_opts);
    checks.push_back({"ser_symbol_level_vs_semianalytic", sym.value, semi.value,
                      4.0 * std::hypot(sym.std_error, semi.std_error)});
  }

  // Golden section may not do worse than the closed form; value is the
  // excess over the closed-form SER, so only the positive side matters.
  for (auto objective : {opt::Objective::location, opt::Objective::power}) {
    const double fixed = objective == opt::Objective::location ? spec.rho_lambda : spec.rho_d;
    const auto closed = opt::closed_form_1d(objective, cfg, fixed);
    const auto golden = opt::minimize_1d(objective, cfg, fixed);
    const std::string name = objective == opt::Objective::location ? "golden_location_gain"
                                                                   : "golden_power_gain";
    checks.push_back({name, std::max(0.0, golden.ser - closed.ser), 0.0, 1e-12});
  }
  const auto joint = opt::select_joint_optimum(cfg);
  const double particular =
      analytic::ser_series(link_stats(cfg, opt::particular_joint_solution(cfg)), mod);
  checks.push_back({"joint_vs_particular", std::max(0.0, joint.ser - particular), 0.0, 0.0});
  return checks;
}

RunOutput run_validate(const ExperimentSpec& spec) {
  RunOutput out;
  Table t{{"check", "value", "reference", "tolerance", "pass"}, {}};
  for (const auto& c : validation_checks(spec)) {
    const bool ok = c.pass();
    out.checks_passed = out.checks_passed && ok;
    t.rows.push_back({c.name, format_number(c.value), format_number(c.reference),
                      format_number(c.tolerance), ok ? "true" : "false"});
  }
  out.csv = t.render();
  return out;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

RunOutput execute(const ExperimentSpec& spec) {
  spec.scenario().validate();
  switch (spec.command) {
    case Command::outage:
      return {run_single(spec, outage_table()).render()};
    case Command::ser:
      return {run_single(spec, ser_table()).render()};
    case Command::optimize_location:
      return {run_single(spec, optimize_1d_table(opt::Objective::location)).render()};
    case Command::optimize_power:
      return {run_single(spec, optimize_1d_table(opt::Objective::power)).render()};
    case Command::optimize_joint:
      return {run_single(spec, optimize_joint_table()).render()};
    case Command::figure:
      return {run_figure(spec).render()};
    case Command::validate:
      if (spec.sweep) throw ConfigError("validate: sweeps are not supported");
      return run_validate(spec);
  }
  throw ConfigError("unknown command");
}

int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  RunOutput result;
  try {
    result = execute(spec);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << " (achieved error " << e.achieved_error() << ")\n";
    return kExitNumeric;
  }

  if (spec.output_path.empty()) {
    out << result.csv;
  } else {
    std::ofstream file(spec.output_path, std::ios::binary);
    file << result.csv;
    if (!file) {
      err << "error: cannot write " << spec.output_path << '\n';
      return kExitUsage;
    }
  }
  if (!result.checks_passed) {
    err << "validation failed\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace fdrelay::cli
