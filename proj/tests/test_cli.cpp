#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "fdrelay/cli/config.hpp"
#include "fdrelay/cli/experiment.hpp"
#include "fdrelay/error.hpp"

using namespace fdrelay;
using namespace fdrelay::cli;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string field;
    std::istringstream fields(line);
    while (std::getline(fields, field, ',')) row.push_back(field);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

std::string header_of(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

ExperimentSpec quick(Command c) {
  ExperimentSpec s;
  s.command = c;
  s.mc_samples = 20'000;
  s.threads = 1;
  return s;
}

std::string config_error(const std::string& text) {
  ExperimentSpec s;
  std::istringstream in(text);
  try {
    load_config(s, in, "run.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Sweep, PointsAreInclusive) {
  const auto s = parse_sweep("total_power_db=0:40:10");
  EXPECT_EQ(s.variable, "total_power_db");
  EXPECT_EQ(s.points(), (std::vector<double>{0, 10, 20, 30, 40}));
  EXPECT_EQ(parse_sweep("rho_d=0.1:0.3:0.1").points().size(), 3u);
  EXPECT_EQ(parse_sweep("rsi_level=0.3:0:-0.1").points().size(), 4u);
  EXPECT_EQ(parse_sweep("threshold=2:2:1").points().size(), 1u);
}

TEST(Sweep, RejectsMalformedRanges) {
  EXPECT_THROW(parse_sweep("total_power_db=0:40"), ConfigError);
  EXPECT_THROW(parse_sweep("total_power_db=40:0:5"), ConfigError);
  EXPECT_THROW(parse_sweep("total_power_db=0:40:0"), ConfigError);
  EXPECT_THROW(parse_sweep("seed=0:4:1"), ConfigError);
  EXPECT_THROW(parse_sweep("nothing"), ConfigError);
}

TEST(Config, AppliesKeysAndConvertsDecibels) {
  ExperimentSpec s;
  std::istringstream in(
      "# canonical scenario\n"
      "total_power_db = 30\n"
      "rsi_level = 0.2   # trailing comment\n"
      "pathloss_exp=2.5\n"
      "\n"
      "sum_distance = 2\n"
      "rho_lambda = 0.4\n"
      "rho_d = 0.6\n"
      "modulation = bpsk\n"
      "mc_samples = 1e5\n"
      "seed = 99\n"
      "sweep = total_power_db=10:20:5\n");
  load_config(s, in, "run.cfg");
  EXPECT_DOUBLE_EQ(s.scenario().total_power, 1000.0);
  EXPECT_EQ(s.config.rsi_level, 0.2);
  EXPECT_EQ(s.config.pathloss_exp, 2.5);
  EXPECT_EQ(s.config.sum_distance, 2.0);
  EXPECT_EQ(s.rho_lambda, 0.4);
  EXPECT_EQ(s.rho_d, 0.6);
  EXPECT_EQ(s.mc_samples, 100000u);
  EXPECT_EQ(s.seed, 99u);
  ASSERT_TRUE(s.sweep);
  EXPECT_EQ(s.sweep->points().size(), 3u);
}

TEST(Config, ErrorsNameLineAndField) {
  const auto bad_value = config_error("seed = 1\nrsi_level = abc\n");
  EXPECT_NE(bad_value.find("run.cfg:2"), std::string::npos) << bad_value;
  EXPECT_NE(bad_value.find("rsi_level"), std::string::npos) << bad_value;

  const auto unknown = config_error("\n\ncolour = red\n");
  EXPECT_NE(unknown.find("run.cfg:3"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("colour"), std::string::npos) << unknown;

  EXPECT_NE(config_error("rho_d = 1.5\n").find("rho_d"), std::string::npos);
  EXPECT_NE(config_error("seed = 1.5\n").find("seed"), std::string::npos);
  EXPECT_NE(config_error("modulation = qpsk\n").find("modulation"), std::string::npos);
  EXPECT_NE(config_error("just words\n").find("run.cfg:1"), std::string::npos);
  EXPECT_EQ(config_error("pathloss_exp = 4\n"), "");
}

TEST(Config, EveryKeyIsAccepted) {
  for (auto key : config_keys()) {
    ExperimentSpec s;
    const std::string value = key == "modulation"     ? "bpsk"
                              : key == "sweep"        ? "total_power_db=0:10:5"
                              : key == "pathloss_exp" ? "2.5"
                              : key == "mc_samples"   ? "50000"
                              : key == "seed"         ? "7"
                                                      : "0.5";
    EXPECT_NO_THROW(apply_setting(s, key, value, "--flag")) << key;
  }
}

TEST(Run, SerColumnsAndDeterminism) {
  auto spec = quick(Command::ser);
  spec.sweep = parse_sweep("total_power_db=10:30:10");
  const auto a = execute(spec).csv;
  spec.threads = 4;
  const auto b = execute(spec).csv;
  EXPECT_EQ(a, b);
  EXPECT_EQ(header_of(a), "p_db,ser_series,ser_quadrature,ser_mc,ser_mc_stderr,ser_floor");
  const auto rows = parse_csv(a);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1][0], "10");
  EXPECT_EQ(rows[3][0], "30");
}

TEST(Run, ModeSelectsColumnsToFill) {
  auto spec = quick(Command::ser);
  spec.mode = RunMode::analytic;
  auto rows = parse_csv(execute(spec).csv);
  EXPECT_FALSE(rows[1][1].empty());
  EXPECT_TRUE(rows[1][3].empty());
  spec.mode = RunMode::mc;
  rows = parse_csv(execute(spec).csv);
  EXPECT_TRUE(rows[1][1].empty());
  EXPECT_FALSE(rows[1][3].empty());
}

TEST(Run, OutageSweepOverThreshold) {
  auto spec = quick(Command::outage);
  spec.sweep = parse_sweep("threshold=0.5:2:0.5");
  const auto csv = execute(spec).csv;
  EXPECT_EQ(header_of(csv),
            "threshold,outage_asymptotic,outage_exact,outage_mc,outage_mc_stderr");
  EXPECT_EQ(parse_csv(csv).size(), 5u);
}

TEST(Run, JointWithoutInterferenceIsSymmetric) {
  auto spec = quick(Command::optimize_joint);
  spec.config.rsi_level = 0.0;
  spec.sweep = parse_sweep("total_power_db=0:40:20");
  const auto rows = parse_csv(execute(spec).csv);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"p_db", "rho_lambda", "rho_d", "ser",
                                               "foc_residual", "method"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], "0.5");
    EXPECT_EQ(rows[i][2], "0.5");
  }
}

TEST(Run, OptimizeLocationReportsBothMethods) {
  auto spec = quick(Command::optimize_location);
  spec.total_power_db = 40.0;
  const auto rows = parse_csv(execute(spec).csv);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(std::stod(rows[1][2]), std::stod(rows[1][4]), 0.02);
}

TEST(Run, ExitCodes) {
  std::ostringstream out, err;
  auto spec = quick(Command::figure);
  spec.figure = 1;
  EXPECT_EQ(run(spec, out, err), kExitUsage);
  EXPECT_NE(err.str().find("figure"), std::string::npos);

  spec = quick(Command::ser);
  spec.config.pathloss_exp = 0.5;
  EXPECT_EQ(run(spec, out, err), kExitUsage);

  spec = quick(Command::ser);
  spec.output_path = "/nonexistent-dir/out.csv";
  EXPECT_EQ(run(spec, out, err), kExitUsage);

  spec = quick(Command::validate);
  spec.total_power_db = -10.0;  // far below where the closed forms hold
  std::ostringstream csv;
  EXPECT_EQ(run(spec, csv, err), kExitValidation);
  EXPECT_NE(csv.str().find("false"), std::string::npos);
}

TEST(Run, ValidatePassesOnCanonicalScenario) {
  auto spec = quick(Command::validate);
  spec.mc_samples = 200'000;
  const auto result = execute(spec);
  EXPECT_TRUE(result.checks_passed) << result.csv;
  EXPECT_EQ(header_of(result.csv), "check,value,reference,tolerance,pass");
  spec.threads = 3;
  EXPECT_EQ(execute(spec).csv, result.csv);
}

TEST(Figures, OptimalRatiosShape) {
  auto spec = quick(Command::figure);
  spec.figure = 3;
  const auto rows = parse_csv(execute(spec).csv);
  EXPECT_EQ(rows.size(), 1u + kFigureRsiGrid.size() * 19u);
  // source power share grows as the relay moves away from the source
  for (std::size_t i = 2; i < 1u + 19u; ++i) {
    EXPECT_GT(std::stod(rows[i][4]), std::stod(rows[i - 1][4]));
  }
}

TEST(Figures, PowerSplitCurvesAreUShaped) {
  auto spec = quick(Command::figure);
  spec.figure = 5;
  spec.mode = RunMode::analytic;
  const auto rows = parse_csv(execute(spec).csv);
  for (double rsi : kFigureRsiGrid) {
    std::vector<double> ser;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (std::stod(rows[i][0]) == rsi) ser.push_back(std::stod(rows[i][2]));
    }
    const auto min_it = std::min_element(ser.begin(), ser.end());
    const auto k = static_cast<std::size_t>(min_it - ser.begin());
    ASSERT_GT(k, 0u);
    ASSERT_LT(k + 1, ser.size());
    for (std::size_t i = 1; i <= k; ++i) EXPECT_LT(ser[i], ser[i - 1]) << rsi;
    for (std::size_t i = k + 1; i < ser.size(); ++i) EXPECT_GT(ser[i], ser[i - 1]) << rsi;
  }
}

TEST(Figures, FixedAllocationFloorsWhileJointKeepsFalling) {
  auto spec = quick(Command::figure);
  spec.figure = 8;
  spec.mode = RunMode::analytic;
  const auto rows = parse_csv(execute(spec).csv);
  const auto& last = rows.back();
  const auto& prev = rows[rows.size() - 2];
  EXPECT_EQ(last[0], "60");
  EXPECT_GT(std::stod(last[1]) / std::stod(prev[1]), 0.95);
  for (std::size_t i = 5; i < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][6]), std::stod(rows[i - 1][6]));
    EXPECT_LE(std::stod(rows[i][6]), std::stod(rows[i][2]) * (1.0 + 1e-12));
  }
}

TEST(Figures, AllNumbersRun) {
  for (int fig : {2, 4, 6, 7, 9}) {
    auto spec = quick(Command::figure);
    spec.figure = fig;
    spec.mode = RunMode::analytic;
    const auto result = execute(spec);
    EXPECT_GT(parse_csv(result.csv).size(), 10u) << fig;
  }
}
