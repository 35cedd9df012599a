#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "fdrelay/analytic.hpp"
#include "fdrelay/error.hpp"
#include "fdrelay/sfun.hpp"
#include "oracles.hpp"

using namespace fdrelay;
using boost::multiprecision::cpp_rational;

namespace {

SystemConfig scenario(double p_db, double eps, double v = 3.0) {
  SystemConfig cfg;
  cfg.total_power = db_to_linear(p_db);
  cfg.rsi_level = eps;
  cfg.pathloss_exp = v;
  return cfg;
}

LinkStats canonical_stats() { return LinkStats::from_means(400.0, 400.0, 5.0); }

// Coefficient recurrence in exact rational arithmetic: match the x^(2i) and
// x^(2i+1) Taylor coefficients of 1/(1+x).
std::vector<std::pair<cpp_rational, cpp_rational>> rational_coeffs(int n) {
  std::vector<std::pair<cpp_rational, cpp_rational>> out;
  auto fact = [](int k) {
    cpp_rational f = 1;
    for (int j = 2; j <= k; ++j) f *= j;
    return f;
  };
  for (int i = 0; i < n; ++i) {
    cpp_rational even = 1, odd = 1;
    for (int j = 0; j < i; ++j) {
      const auto& [aj, bj] = out[j];
      cpp_rational bp = 1;
      for (int k = 0; k < 2 * (i - j); ++k) bp *= bj;
      even -= aj * bp / fact(2 * (i - j));
      odd -= aj * bp * bj / fact(2 * (i - j) + 1);
    }
    out.emplace_back(even, odd / even);
  }
  return out;
}

// Survivor integral over gamma_RD by exp-sinh quadrature (independent of the
// library's Gauss-Kronrod code).
double exact_cdf_oracle(double x, const LinkStats& s) {
  boost::math::quadrature::exp_sinh<double> es;
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double first = x + x * x / u;
    return std::exp(-first / s.lambda_sr - (u + x) / s.lambda_rd) / (1.0 + s.eta * first);
  };
  return 1.0 - es.integrate(f, 1e-14) / s.lambda_rd;
}

double ser_oracle(const std::function<double(double)>& cdf, const Modulation& m) {
  boost::math::quadrature::exp_sinh<double> es;
  const double pref = m.alpha * std::sqrt(m.beta) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  auto f = [&](double u) { return 2.0 * cdf(u * u) * std::exp(-0.5 * m.beta * u * u); };
  return pref * es.integrate(f, 1e-14);
}

}  // namespace

TEST(ApproxCoeffs, MatchesExactRationals) {
  const auto exact = rational_coeffs(5);
  EXPECT_EQ(exact[0].first, cpp_rational(1));
  EXPECT_EQ(exact[0].second, cpp_rational(1));
  EXPECT_EQ(exact[1].first, cpp_rational(1, 2));
  EXPECT_EQ(exact[1].second, cpp_rational(5, 3));
  EXPECT_EQ(exact[2].first, cpp_rational(19, 72));
  EXPECT_EQ(exact[2].second, cpp_rational(1963, 855));

  const auto got = analytic::approx_coeffs(5);
  ASSERT_EQ(got.pairs.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const double a = static_cast<double>(exact[i].first);
    const double b = static_cast<double>(exact[i].second);
    // later pairs inherit rounding from every earlier one
    const double tol = i < 3 ? 1e-15 : 1e-13;
    EXPECT_NEAR(got.pairs[i].a, a, tol * std::abs(a)) << "i=" << i;
    EXPECT_NEAR(got.pairs[i].b, b, tol * std::abs(b)) << "i=" << i;
  }
}

TEST(ApproxCoeffs, ApproximatesReciprocalNearZero) {
  const auto c = analytic::approx_coeffs(3);
  for (double x : {0.01, 0.05, 0.1}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
      sum += c.pairs[i].a * std::pow(x, 2.0 * i) * std::exp(-c.pairs[i].b * x);
    }
    // matched through x^5, so the error is O(x^6)
    EXPECT_NEAR(sum, 1.0 / (1.0 + x), 2.0 * std::pow(x, 6));
  }
  EXPECT_THROW(analytic::approx_coeffs(0), DomainError);
}

TEST(SinrCdf, ExactMatchesIndependentQuadrature) {
  const auto s = canonical_stats();
  for (double x : {0.1, 1.0, 3.0, 10.0, 50.0}) {
    EXPECT_NEAR(analytic::sinr_cdf_exact_numeric(x, s), exact_cdf_oracle(x, s), 1e-10) << x;
  }
  const auto skewed = LinkStats::from_means(37.0, 2100.0, 3.0);
  for (double x : {0.5, 4.0}) {
    EXPECT_NEAR(analytic::sinr_cdf_exact_numeric(x, skewed), exact_cdf_oracle(x, skewed), 1e-10);
  }
}

TEST(SinrCdf, ClassicalFormWithoutInterference) {
  const auto s = LinkStats::from_means(80.0, 250.0, 0.0);
  for (double x : {0.2, 1.0, 5.0, 30.0}) {
    const double arg = 2.0 * x / std::sqrt(s.lambda_sr * s.lambda_rd);
    const double classical = 1.0 - std::exp(-(1.0 / 80.0 + 1.0 / 250.0) * x) * arg *
                                       oracle::bessel_k1(arg);
    EXPECT_NEAR(analytic::sinr_cdf_asymptotic(x, s), classical, 1e-13);
    EXPECT_NEAR(analytic::sinr_cdf_exact_numeric(x, s), classical, 1e-10);
    EXPECT_EQ(analytic::cdf_gap_bound(x, s), 0.0);
  }
}

TEST(SinrCdf, AsymptoticBelowExactWithinGapBound) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const auto s = LinkStats::from_means(std::pow(10.0, 1.0 + 3.0 * u(gen)),
                                         std::pow(10.0, 1.0 + 3.0 * u(gen)),
                                         std::pow(10.0, -1.0 + 3.0 * u(gen)));
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
      const double asym = analytic::sinr_cdf_asymptotic(x, s);
      const double exact = analytic::sinr_cdf_exact_numeric(x, s);
      EXPECT_LE(asym, exact + 1e-10);
      EXPECT_LE(exact - asym, analytic::cdf_gap_bound(x, s) + 1e-10);
    }
  }
}

TEST(SinrCdf, DistributionShape) {
  const auto s = canonical_stats();
  double prev_a = 0.0, prev_e = 0.0;
  EXPECT_EQ(analytic::sinr_cdf_asymptotic(0.0, s), 0.0);
  EXPECT_EQ(analytic::sinr_cdf_exact_numeric(0.0, s), 0.0);
  for (double x = 0.25; x < 5000.0; x *= 1.7) {
    const double a = analytic::sinr_cdf_asymptotic(x, s);
    const double e = analytic::sinr_cdf_exact_numeric(x, s);
    EXPECT_GE(a, prev_a);
    EXPECT_GE(e, prev_e - 1e-10);
    prev_a = a;
    prev_e = e;
  }
  EXPECT_GT(prev_a, 1.0 - 1e-9);
  EXPECT_THROW(analytic::sinr_cdf_asymptotic(-1.0, s), DomainError);
  EXPECT_EQ(analytic::outage(2.0, s, analytic::CdfMode::exact),
            analytic::sinr_cdf_exact_numeric(2.0, s));
}

TEST(SinrCdf, HighPowerGapIsSmall) {
  // 30 dB, eps = 0.01: closed form within 5% of the integral
  const auto s = link_stats(scenario(30.0, 0.01), Allocation(0.5, 0.5));
  for (double x : {0.5, 1.0, 2.0, 4.0}) {
    const double exact = analytic::sinr_cdf_exact_numeric(x, s);
    EXPECT_LT(std::abs(analytic::sinr_cdf_asymptotic(x, s) - exact) / exact, 0.05);
  }
}

TEST(Kappa, BpskValue) { EXPECT_NEAR(analytic::kappa(Modulation::bpsk()), 0.5, 1e-16); }

TEST(SerFromCdf, SingleRayleighHop) {
  const auto mod = Modulation::bpsk();
  for (double lambda : {0.5, 10.0, 1000.0}) {
    auto cdf = [lambda](double t) { return -std::expm1(-t / lambda); };
    const double g = 0.5 * mod.beta * lambda;
    const double closed = 0.5 * mod.alpha * (1.0 - std::sqrt(g / (1.0 + g)));
    EXPECT_NEAR(analytic::ser_from_cdf(cdf, mod), closed, 1e-11 + 1e-9 * closed);
  }
}

TEST(SerQuadrature, MatchesIndependentQuadrature) {
  const auto mod = Modulation::bpsk();
  for (double p_db : {10.0, 20.0, 30.0}) {
    const auto s = link_stats(scenario(p_db, 0.1), Allocation(0.4, 0.6));
    const double want =
        ser_oracle([&](double t) { return analytic::sinr_cdf_asymptotic(t, s); }, mod);
    EXPECT_NEAR(analytic::ser_quadrature(s, mod) / want, 1.0, 1e-8);
  }
}

TEST(SerSeries, SingleTermWithoutInterference) {
  const auto mod = Modulation::bpsk();
  const auto s = LinkStats::from_means(300.0, 120.0, 0.0);
  const auto br = analytic::ser_series_terms(s, mod, 3);
  EXPECT_EQ(br.terms[1], 0.0);
  EXPECT_EQ(br.terms[2], 0.0);
  const double r = std::sqrt(s.lambda_sr), q = std::sqrt(s.lambda_rd);
  const double x0 = 1.0 + std::pow(1.0 / r + 1.0 / q, 2);
  const double y0 = 1.0 + std::pow(1.0 / r - 1.0 / q, 2);
  const double c0 = oracle::gamma_fn(2.5) * oracle::gamma_fn(0.5) / oracle::gamma_fn(2.0);
  const double i0 = c0 * 2.0 * std::sqrt(4.0) / (s.lambda_sr * s.lambda_rd) *
                    std::pow(x0, -2.5) * oracle::hyp2f1(2.5, 1.5, 2.0, y0 / x0);
  EXPECT_NEAR(br.terms[0] / i0, 1.0, 1e-11);
  EXPECT_NEAR(br.value, 0.5 - i0, 1e-13);
}

TEST(SerSeries, MatchesQuadratureAcrossPower) {
  const auto mod = Modulation::bpsk();
  for (double eps : {0.0, 0.01, 0.1}) {
    for (double p_db : {10.0, 15.0, 20.0, 25.0, 30.0}) {
      const auto s = link_stats(scenario(p_db, eps), Allocation(0.5, 0.5));
      const double quad = analytic::ser_quadrature(s, mod);
      EXPECT_LT(std::abs(analytic::ser_series(s, mod) - quad) / quad, 0.01)
          << "eps=" << eps << " P=" << p_db;
    }
  }
}

TEST(SerSeries, StaysInRangeAndReportsClamping) {
  const auto mod = Modulation::bpsk();
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const auto s = LinkStats::from_means(std::pow(10.0, -1.0 + 5.0 * u(gen)),
                                         std::pow(10.0, -1.0 + 5.0 * u(gen)),
                                         std::pow(10.0, -2.0 + 5.0 * u(gen)));
    const auto br = analytic::ser_series_terms(s, mod);
    EXPECT_GE(br.value, 0.0);
    EXPECT_LE(br.value, 0.5);
    EXPECT_EQ(br.clamped, br.value != br.unclamped);
  }
  const auto before = analytic::ser_clamp_events();
  // strong interference and weak links push the truncated series negative
  const auto br = analytic::ser_series_terms(LinkStats::from_means(0.01, 0.01, 50.0), mod);
  if (br.clamped) EXPECT_GT(analytic::ser_clamp_events(), before);
}

TEST(SerSeries, DecreasesWithPowerWithoutInterference) {
  const auto mod = Modulation::bpsk();
  double prev = 0.5;
  for (double p_db = 0.0; p_db <= 50.0; p_db += 5.0) {
    const auto s = link_stats(scenario(p_db, 0.0), Allocation(0.5, 0.5));
    const double ser = analytic::ser_series(s, mod);
    EXPECT_LT(ser, prev);
    prev = ser;
  }
}

TEST(HighPower, ObjectiveMatchesLinkStats) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 50; ++k) {
    auto cfg = scenario(40.0 * u(gen), u(gen), 2.0 + 2.0 * u(gen));
    const Allocation a(u(gen), u(gen));
    const auto s = link_stats(cfg, a);
    const double f = analytic::f_objective(a, cfg);
    EXPECT_NEAR(f, 1.0 + 1.0 / s.lambda_sr + 1.0 / s.lambda_rd + s.eta, 1e-12 * f);
    EXPECT_NEAR(analytic::ser_high_power(s, cfg.modulation), 0.5 - 0.5 / std::sqrt(f), 1e-15);
  }
}

TEST(HighPower, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int k = 0; k < 50; ++k) {
    auto cfg = scenario(40.0 * u(gen), u(gen), 2.0 + 2.0 * u(gen));
    const double rl = u(gen), rd = u(gen), h = 1e-6;
    const auto g = analytic::f_gradient(Allocation(rl, rd), cfg);
    const double fd_rl = (analytic::f_objective(Allocation(rl + h, rd), cfg) -
                          analytic::f_objective(Allocation(rl - h, rd), cfg)) /
                         (2.0 * h);
    const double fd_rd = (analytic::f_objective(Allocation(rl, rd + h), cfg) -
                          analytic::f_objective(Allocation(rl, rd - h), cfg)) /
                         (2.0 * h);
    EXPECT_NEAR(g.d_rho_lambda, fd_rl, 1e-6 * (1.0 + std::abs(fd_rl)));
    EXPECT_NEAR(g.d_rho_d, fd_rd, 1e-6 * (1.0 + std::abs(fd_rd)));
  }
}

TEST(HighPower, FloorIsTheInfinitePowerLimit) {
  const Allocation a(0.5, 0.5);
  auto cfg = scenario(120.0, 0.1);
  const double limit = analytic::ser_high_power(link_stats(cfg, a), cfg.modulation);
  EXPECT_NEAR(analytic::ser_floor(a, cfg), limit, 1e-9);
  EXPECT_NEAR(analytic::ser_floor(a, scenario(20.0, 0.0)), 0.0, 1e-16);
}
