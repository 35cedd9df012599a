#pragma once

// Special functions needed by the closed-form outage and SER expressions.
// Everything here is a pure function of its arguments and safe to call from
// any thread.

#include <cmath>

namespace fdrelay::sfun {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double gauss_q(double x);

/// Modified Bessel function of the second kind, order one. Throws
/// DomainError for x <= 0.
double bessel_k1(double x);

/// exp(x) * K1(x); finite for all x > 0 where K1 itself underflows.
double bessel_k1_scaled(double x);

/// x * K1(x), continuously extended with the value 1 at x = 0.
double x_bessel_k1(double x);

/// Exponential integral E1(x) = int_x^inf e^-t / t dt. Throws DomainError for
/// x <= 0.
double exp_integral_e1(double x);

/// exp(x) * E1(x).
double exp_integral_e1_scaled(double x);

/// Gamma function. Throws DomainError at the poles 0, -1, -2, ...
double gamma_fn(double x);

/// Digamma psi(x) = Gamma'(x)/Gamma(x). Throws DomainError at the poles.
double digamma(double x);

/// Gauss hypergeometric function 2F1(a, b; c; z) for 0 <= z < 1.
///
/// Uses the power series for z <= 0.5 and the z -> 1 - z connection formula
/// above that. When c - a - b is an integer (the case for every term of the
/// SER series, where c - a - b = -2) the logarithmic form of the connection
/// formula is used. Throws DomainError when c is a non-positive integer and
/// NumericError when z >= 1.
double hyp2f1(double a, double b, double c, double z);

/// Same as hyp2f1 but takes w = 1 - z, so that arguments very close to one
/// keep full relative precision in the distance to the singular point.
double hyp2f1_one_minus(double a, double b, double c, double w);

/// Direct Gauss series. Exposed so the two evaluation routes can be compared.
double hyp2f1_power_series(double a, double b, double c, double z);

/// Connection-formula route evaluated at w = 1 - z. Valid for 0 < w <= 1 but
/// only efficient for w <= 0.6 or so.
double hyp2f1_connection(double a, double b, double c, double w);

}  // namespace fdrelay::sfun
