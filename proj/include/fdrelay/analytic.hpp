#pragma once

// Closed-form and quadrature performance expressions for the full-duplex AF
// relay link: end-to-end SINR distribution, outage, average SER and the
// high-power objective used by the optimizers.

#include <cstdint>
#include <functional>
#include <vector>

#include "fdrelay/model.hpp"

namespace fdrelay::analytic {

/// Default number of (A_i, B_i) pairs in the SER series.
inline constexpr int kDefaultSeriesTerms = 3;

struct CoeffPair {
  double a;
  double b;
};

/// Coefficients of 1/(1+x) ~= sum_i A_i x^(2i) exp(-B_i x).
///
/// Each new pair is fixed so the x^(2i) and x^(2i+1) Taylor coefficients of
/// the sum match those of 1/(1+x), given all earlier pairs.
struct ApproxCoeffs {
  std::vector<CoeffPair> pairs;
};

/// Throws NumericError naming the index if some A_i vanishes.
ApproxCoeffs approx_coeffs(int n_terms);

/// Closed-form (high-power) CDF of the end-to-end SINR.
double sinr_cdf_asymptotic(double x, const LinkStats& stats);

/// CDF of the end-to-end SINR without the closed-form simplification, by
/// adaptive quadrature of the survivor integral over the relay-destination
/// SNR. Absolute error <= 1e-10; throws NumericError otherwise.
double sinr_cdf_exact_numeric(double x, const LinkStats& stats);

/// Upper bound on the gap between the quadrature CDF and the closed form at
/// threshold x (the dropped part of the survivor integral).
double cdf_gap_bound(double x, const LinkStats& stats);

enum class CdfMode { asymptotic, exact };

/// Outage probability Pr{SINR < threshold}.
double outage(double threshold, const LinkStats& stats, CdfMode mode = CdfMode::asymptotic);

/// kappa = alpha sqrt(beta) / (2 sqrt(2 pi)) * Gamma(1/2).
double kappa(const Modulation& mod);

struct SeriesBreakdown {
  std::vector<double> terms;  // I_0 ... I_{n-1}
  double unclamped = 0.0;     // 1/2 - sum of terms
  double value = 0.0;         // clamped into [0, 1/2]
  bool clamped = false;
};

/// Average SER from the hypergeometric series with n_terms coefficient pairs.
SeriesBreakdown ser_series_terms(const LinkStats& stats, const Modulation& mod,
                                 int n_terms = kDefaultSeriesTerms);
double ser_series(const LinkStats& stats, const Modulation& mod,
                  int n_terms = kDefaultSeriesTerms);

/// Number of times ser_series has clamped its result, process-wide.
std::uint64_t ser_clamp_events();

/// alpha E[Q(sqrt(beta gamma))] for an arbitrary SINR CDF, by quadrature
/// (absolute error <= 1e-9).
double ser_from_cdf(const std::function<double(double)>& cdf, const Modulation& mod);

/// ser_from_cdf applied to sinr_cdf_asymptotic.
double ser_quadrature(const LinkStats& stats, const Modulation& mod);

/// Single-term (I_0) high-power SER.
double ser_high_power(const LinkStats& stats, const Modulation& mod);

/// High-power objective f(rho_lambda, rho_d); SER ~= 1/2 - kappa f^(-1/2).
double f_objective(const Allocation& alloc, const SystemConfig& cfg);

struct Gradient {
  double d_rho_lambda;
  double d_rho_d;
};

/// Analytic partial derivatives of f_objective.
Gradient f_gradient(const Allocation& alloc, const SystemConfig& cfg);

/// SER limit as total power grows without bound with the ratios held fixed.
double ser_floor(const Allocation& alloc, const SystemConfig& cfg);

/// High-power SER at the closed-form optimal relay location for a given
/// power split.
double ser_location_optimized(const SystemConfig& cfg, double rho_lambda);

/// High-power SER at the closed-form optimal power split for a given relay
/// location.
double ser_power_optimized(const SystemConfig& cfg, double rho_d);

}  // namespace fdrelay::analytic
