#include "fdrelay/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "fdrelay/error.hpp"
#include "fdrelay/quadrature.hpp"
#include "fdrelay/sfun.hpp"

namespace fdrelay::analytic {

namespace {

std::atomic<std::uint64_t> g_clamp_events{0};

double factorial(int n) { return std::tgamma(n + 1.0); }

void require_ratio(double r, const char* what) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError(std::string(what) + " must lie in (0, 1)");
}

}  // namespace

ApproxCoeffs approx_coeffs(int n_terms) {
  if (n_terms < 1) throw DomainError("approx_coeffs: need at least one term");
  ApproxCoeffs out;
  out.pairs.reserve(static_cast<std::size_t>(n_terms));
  for (int i = 0; i < n_terms; ++i) {
    sfun::CompensatedSum even(1.0);
    sfun::CompensatedSum odd(1.0);
    for (int j = 0; j < i; ++j) {
      const auto [aj, bj] = out.pairs[static_cast<std::size_t>(j)];
      even += -aj * std::pow(bj, 2 * (i - j)) / factorial(2 * (i - j));
      odd += -aj * std::pow(bj, 2 * (i - j) + 1) / factorial(2 * (i - j) + 1);
    }
    const double a = even.value();
    if (a == 0.0) {
      throw NumericError("approx_coeffs: A_" + std::to_string(i) + " vanished");
    }
    out.pairs.push_back({a, odd.value() / a});
  }
  return out;
}

double sinr_cdf_asymptotic(double x, const LinkStats& stats) {
  if (!(x >= 0.0)) throw DomainError("sinr_cdf_asymptotic: threshold must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double s = 2.0 * x / std::sqrt(stats.lambda_sr * stats.lambda_rd);
  const double decay = std::exp(-(1.0 / stats.lambda_sr + 1.0 / stats.lambda_rd) * x);
  const double survivor = decay / (1.0 + stats.eta * x) * sfun::x_bessel_k1(s);
  return std::clamp(1.0 - survivor, 0.0, 1.0);
}

double sinr_cdf_exact_numeric(double x, const LinkStats& stats) {
  if (!(x >= 0.0)) throw DomainError("sinr_cdf_exact_numeric: threshold must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double inv_sr = 1.0 / stats.lambda_sr;
  const double inv_rd = 1.0 / stats.lambda_rd;
  const double eta = stats.eta;
  // u = gamma_RD - x; the first hop must then exceed x + x^2/u.
  auto integrand = [=](double u) {
    if (u <= 0.0) return 0.0;
    const double first_hop = x + x * x / u;
    if (std::isinf(first_hop)) return 0.0;
    return std::exp(-first_hop * inv_sr - (u + x) * inv_rd) / (1.0 + eta * first_hop);
  };
  quad::QuadratureOptions opts;
  opts.abs_tol = 0.5e-10 * stats.lambda_rd;
  const auto res = quad::integrate_half_line(integrand, x, opts);
  return std::clamp(1.0 - res.value * inv_rd, 0.0, 1.0);
}

double cdf_gap_bound(double x, const LinkStats& stats) {
  if (!(x >= 0.0)) throw DomainError("cdf_gap_bound: threshold must be nonnegative");
  if (x == 0.0 || stats.eta == 0.0) return 0.0;
  const double c = std::exp(-(1.0 / stats.lambda_sr + 1.0 / stats.lambda_rd) * x);
  const double z = stats.eta * x * x / (stats.lambda_rd * (1.0 + stats.eta * x));
  return c * z * sfun::exp_integral_e1_scaled(z);
}

double outage(double threshold, const LinkStats& stats, CdfMode mode) {
  switch (mode) {
    case CdfMode::asymptotic:
      return sinr_cdf_asymptotic(threshold, stats);
    case CdfMode::exact:
      return sinr_cdf_exact_numeric(threshold, stats);
  }
  throw DomainError("outage: unknown CDF mode");
}

double kappa(const Modulation& mod) {
  // Gamma(1/2) = sqrt(pi)
  return mod.alpha * std::sqrt(mod.beta) / (2.0 * std::sqrt(2.0 * std::numbers::pi)) *
         std::sqrt(std::numbers::pi);
}

SeriesBreakdown ser_series_terms(const LinkStats& stats, const Modulation& mod, int n_terms) {
  const auto coeffs = approx_coeffs(n_terms);
  const double inv_sqrt_sr = 1.0 / std::sqrt(stats.lambda_sr);
  const double inv_sqrt_rd = 1.0 / std::sqrt(stats.lambda_rd);
  const double sum_sq = (inv_sqrt_sr + inv_sqrt_rd) * (inv_sqrt_sr + inv_sqrt_rd);
  const double cross = 4.0 * inv_sqrt_sr * inv_sqrt_rd;  // X_i - Y_i
  const double scale =
      2.0 * mod.alpha * std::sqrt(2.0 * mod.beta) / (stats.lambda_sr * stats.lambda_rd);

  SeriesBreakdown out;
  out.terms.reserve(coeffs.pairs.size());
  sfun::CompensatedSum total(0.5);
  for (std::size_t idx = 0; idx < coeffs.pairs.size(); ++idx) {
    const double i = static_cast<double>(idx);
    const auto [a_i, b_i] = coeffs.pairs[idx];
    const double eta_pow = std::pow(stats.eta, 2.0 * i);
    if (eta_pow == 0.0) {
      out.terms.push_back(0.0);
      continue;
    }
    const double x_i = 0.5 * mod.beta + stats.eta * b_i + sum_sq;
    const double w_i = cross / x_i;  // 1 - Y_i / X_i
    const double c_i = std::tgamma(2.0 * i + 2.5) * std::tgamma(2.0 * i + 0.5) /
                       std::tgamma(2.0 * i + 2.0);
    const double hyp = sfun::hyp2f1_one_minus(2.0 * i + 2.5, 1.5, 2.0 * i + 2.0, w_i);
    const double term = c_i * scale * a_i * eta_pow * std::pow(x_i, -(2.0 * i + 2.5)) * hyp;
    out.terms.push_back(term);
    total += -term;
  }
  out.unclamped = total.value();
  out.value = std::clamp(out.unclamped, 0.0, 0.5);
  out.clamped = out.value != out.unclamped;
  if (out.clamped) g_clamp_events.fetch_add(1, std::memory_order_relaxed);
  return out;
}

double ser_series(const LinkStats& stats, const Modulation& mod, int n_terms) {
  return ser_series_terms(stats, mod, n_terms).value;
}

std::uint64_t ser_clamp_events() { return g_clamp_events.load(std::memory_order_relaxed); }

double ser_from_cdf(const std::function<double(double)>& cdf, const Modulation& mod) {
  const double pref = mod.alpha * std::sqrt(mod.beta) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  // t = u^2 removes the t^(-1/2) endpoint singularity.
  auto integrand = [&](double u) {
    const double t = u * u;
    return 2.0 * cdf(t) * std::exp(-0.5 * mod.beta * t);
  };
  quad::QuadratureOptions opts;
  opts.abs_tol = 1e-12 / pref;
  opts.rel_tol = 1e-10;
  const auto res = quad::integrate_half_line(integrand, std::sqrt(2.0 / mod.beta), opts);
  return pref * res.value;
}

double ser_quadrature(const LinkStats& stats, const Modulation& mod) {
  return ser_from_cdf([&](double t) { return sinr_cdf_asymptotic(t, stats); }, mod);
}

double ser_high_power(const LinkStats& stats, const Modulation& mod) {
  constexpr double b0 = 1.0;
  const double f =
      0.5 * mod.beta + 1.0 / stats.lambda_sr + 1.0 / stats.lambda_rd + b0 * stats.eta;
  return 0.5 - kappa(mod) / std::sqrt(f);
}

double f_objective(const Allocation& alloc, const SystemConfig& cfg) {
  const double v = cfg.pathloss_exp;
  const double ps = alloc.source_power(cfg);
  const double pr = alloc.relay_power(cfg);
  return 0.5 * cfg.modulation.beta +
         (1.0 + cfg.rsi_level * pr) / ps * std::pow(alloc.sr_distance(cfg), v) +
         std::pow(alloc.rd_distance(cfg), v) / pr;
}

Gradient f_gradient(const Allocation& alloc, const SystemConfig& cfg) {
  const double v = cfg.pathloss_exp;
  const double p = cfg.total_power;
  const double eps = cfg.rsi_level;
  const double rl = alloc.rho_lambda();
  const double rd = alloc.rho_d();
  const double dv = std::pow(cfg.sum_distance, v);
  const double dsr_v = std::pow(alloc.sr_distance(cfg), v);
  const double drd_v = std::pow(alloc.rd_distance(cfg), v);
  const double ps = alloc.source_power(cfg);
  const double pr = alloc.relay_power(cfg);

  const double d_rl =
      -(dsr_v / p + eps * dsr_v) / (rl * rl) + drd_v / (p * (1.0 - rl) * (1.0 - rl));
  const double a = (1.0 + eps * pr) / ps;
  const double b = 1.0 / pr;
  const double d_rd = v * dv * (a * std::pow(rd, v - 1.0) - b * std::pow(1.0 - rd, v - 1.0));
  return {d_rl, d_rd};
}

double ser_floor(const Allocation& alloc, const SystemConfig& cfg) {
  const double ratio = alloc.relay_power(cfg) / alloc.source_power(cfg);
  const double f = 0.5 * cfg.modulation.beta +
                   cfg.rsi_level * ratio * std::pow(alloc.sr_distance(cfg), cfg.pathloss_exp);
  return 0.5 - kappa(cfg.modulation) / std::sqrt(f);
}

double ser_location_optimized(const SystemConfig& cfg, double rho_lambda) {
  require_ratio(rho_lambda, "ser_location_optimized: power ratio");
  const double v = cfg.pathloss_exp;
  const double p = cfg.total_power;
  const double eps = cfg.rsi_level;
  const double rl = rho_lambda;
  const double rl_bar = 1.0 - rl;
  const double first_hop = 1.0 / (rl * p) + rl_bar / rl * eps;
  const double balance = std::pow(rl_bar / rl + eps * rl_bar * rl_bar / rl * p, 1.0 / (v - 1.0));
  const double f = 0.5 * cfg.modulation.beta +
                   first_hop * std::pow(cfg.sum_distance, v) / std::pow(1.0 + balance, v - 1.0);
  return 0.5 - kappa(cfg.modulation) / std::sqrt(f);
}

double ser_power_optimized(const SystemConfig& cfg, double rho_d) {
  require_ratio(rho_d, "ser_power_optimized: location ratio");
  const double v = cfg.pathloss_exp;
  const double p = cfg.total_power;
  const double rd = rho_d;
  const double f =
      0.5 * cfg.modulation.beta +
      std::pow(cfg.sum_distance, v) / p *
          (std::pow(rd, v) + std::pow(1.0 - rd, v) +
           2.0 * std::pow(rd, 0.5 * v) * std::pow(1.0 - rd, 0.5 * v) *
               std::sqrt(p * cfg.rsi_level + 1.0));
  return 0.5 - kappa(cfg.modulation) / std::sqrt(f);
}

}  // namespace fdrelay::analytic
