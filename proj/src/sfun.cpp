#include "fdrelay/sfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fdrelay/error.hpp"

namespace fdrelay::sfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 100000;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

bool is_near_integer(double x, double tol = 1e-12) {
  return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

// 1/Gamma(x), zero at the poles.
double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

// Steed's continued fraction (Temme's CF2 form) for K0 and K1, x > 2.
// Returns exp(x) K1(x).
double k1_scaled_cf(double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 10000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) {
      h = a1 * h;
      const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
      return k0 * (x + 0.5 - h) / x;
    }
  }
  throw NumericError("bessel_k1: continued fraction did not converge at x = " +
                     std::to_string(x));
}

// Ascending series, x <= 2.
double k1_series(double x) {
  const double y = 0.25 * x * x;
  CompensatedSum i1_sum;
  CompensatedSum psi_sum;
  double term = 1.0;  // y^k / (k! (k+1)!)
  double psi_k1 = -kEulerGamma;       // psi(k+1)
  double psi_k2 = 1.0 - kEulerGamma;  // psi(k+2)
  for (int k = 0; k < 200; ++k) {
    i1_sum += term;
    psi_sum += (psi_k1 + psi_k2) * term;
    if (term < kEps * 1e-3 * i1_sum.value()) break;
    psi_k1 = psi_k2;
    psi_k2 += 1.0 / (k + 2);
    term *= y / ((k + 1.0) * (k + 2.0));
  }
  const double i1 = 0.5 * x * i1_sum.value();
  return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * psi_sum.value();
}

// E1 by its ascending series, 0 < x <= 1.
double e1_series(double x) {
  CompensatedSum acc(-std::log(x) - kEulerGamma);
  double fact = 1.0;
  for (int i = 1; i < 1000; ++i) {
    fact *= -x / i;
    const double del = -fact / i;
    acc += del;
    if (std::abs(del) < std::abs(acc.value()) * kEps * 0.1) break;
  }
  return acc.value();
}

// exp(x) E1(x) by modified Lentz on the continued fraction, x > 1.
double e1_scaled_cf(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericError("exp_integral_e1: continued fraction did not converge at x = " +
                     std::to_string(x));
}

// 2F1 at z = 1 - w when c = a + b - m for integer m >= 0 (logarithmic case).
double hyp2f1_log_case(double a, double b, int m, double w) {
  const double c = a + b - m;
  double finite_part = 0.0;
  if (m > 0) {
    CompensatedSum head;
    double term = 1.0;
    for (int n = 0; n < m; ++n) {
      head += term;
      term *= (a - m + n) * (b - m + n) * w / ((n + 1.0) * (1.0 - m + n));
    }
    finite_part = std::tgamma(m) * std::tgamma(c) * rgamma(a) * rgamma(b) *
                  std::pow(w, -m) * head.value();
  }

  const double prefactor = (m % 2 == 0 ? -1.0 : 1.0) * std::tgamma(c) * rgamma(a - m) *
                           rgamma(b - m);
  if (prefactor == 0.0) return finite_part;

  const double log_w = std::log(w);
  double term = 1.0 / std::tgamma(m + 1.0);  // (a)_n (b)_n w^n / (n! (n+m)!)
  double psi_n1 = -kEulerGamma;              // psi(n+1)
  double psi_nm1 = digamma(m + 1.0);         // psi(n+m+1)
  double psi_an = digamma(a);
  double psi_bn = digamma(b);
  CompensatedSum tail;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    const double contrib = term * (log_w - psi_n1 - psi_nm1 + psi_an + psi_bn);
    tail += contrib;
    if (n > 2 && std::abs(contrib) <= kEps * 1e-2 * std::abs(tail.value())) {
      return finite_part + prefactor * tail.value();
    }
    term *= (a + n) * (b + n) * w / ((n + 1.0) * (n + m + 1.0));
    psi_n1 += 1.0 / (n + 1.0);
    psi_nm1 += 1.0 / (n + m + 1.0);
    psi_an += 1.0 / (a + n);
    psi_bn += 1.0 / (b + n);
    if (term == 0.0) return finite_part + prefactor * tail.value();
  }
  throw NumericError("hyp2f1: logarithmic connection series did not converge");
}

}  // namespace

double gauss_q(double x) {
  if (std::isnan(x)) throw DomainError("gauss_q: NaN argument");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double bessel_k1(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k1: argument must be positive");
  if (x <= 2.0) return k1_series(x);
  return k1_scaled_cf(x) * std::exp(-x);
}

double bessel_k1_scaled(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k1_scaled: argument must be positive");
  if (x <= 2.0) return k1_series(x) * std::exp(x);
  return k1_scaled_cf(x);
}

double x_bessel_k1(double x) {
  if (x < 0.0) throw DomainError("x_bessel_k1: argument must be nonnegative");
  if (x == 0.0) return 1.0;
  if (x <= 2.0) return x * k1_series(x);
  return x * k1_scaled_cf(x) * std::exp(-x);
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_e1: argument must be positive");
  if (x <= 1.0) return e1_series(x);
  return e1_scaled_cf(x) * std::exp(-x);
}

double exp_integral_e1_scaled(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_e1_scaled: argument must be positive");
  if (x <= 1.0) return e1_series(x) * std::exp(x);
  return e1_scaled_cf(x);
}

double gamma_fn(double x) {
  if (std::isnan(x) || is_nonpositive_integer(x)) {
    throw DomainError("gamma_fn: pole at " + std::to_string(x));
  }
  return std::tgamma(x);
}

double digamma(double x) {
  if (std::isnan(x) || is_nonpositive_integer(x)) {
    throw DomainError("digamma: pole at " + std::to_string(x));
  }
  if (x < 0.0) {
    // psi(x) = psi(1 - x) - pi cot(pi x)
    return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * x);
  }
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 -
                     r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
  return shift + std::log(x) - 0.5 / x - series;
}

double hyp2f1_power_series(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
  if (!(std::abs(z) < 1.0)) throw NumericError("hyp2f1: power series requires |z| < 1");
  CompensatedSum sum;
  double term = 1.0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    sum += term;
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    if (term == 0.0) return sum.value();
    if (n > 2 && std::abs(term) <= kEps * 1e-2 * std::abs(sum.value())) {
      return sum.value() + term;
    }
  }
  throw NumericError("hyp2f1: power series did not converge");
}

double hyp2f1_connection(double a, double b, double c, double w) {
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
  if (!(w > 0.0 && w <= 1.0)) throw NumericError("hyp2f1: connection formula needs 0 < 1-z <= 1");

  const double s = c - a - b;
  if (is_near_integer(s)) {
    const int m = static_cast<int>(std::round(s));
    if (m <= 0) return hyp2f1_log_case(a, b, -m, w);
    if (is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b)) {
      return std::pow(w, m) * hyp2f1_power_series(c - a, c - b, c, 1.0 - w);
    }
    // Euler: F(a,b;c;z) = (1-z)^m F(c-a, c-b; c; z), and the right side has
    // c = a' + b' - m.
    return std::pow(w, m) * hyp2f1_log_case(c - a, c - b, m, w);
  }

  const double gc = std::tgamma(c);
  double result = 0.0;
  const double k1 = gc * std::tgamma(s) * rgamma(c - a) * rgamma(c - b);
  if (k1 != 0.0) result += k1 * hyp2f1_power_series(a, b, 1.0 - s, w);
  const double k2 = gc * std::tgamma(-s) * rgamma(a) * rgamma(b);
  if (k2 != 0.0) result += k2 * std::pow(w, s) * hyp2f1_power_series(c - a, c - b, 1.0 + s, w);
  return result;
}

double hyp2f1_one_minus(double a, double b, double c, double w) {
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
  if (!(w > 0.0)) throw NumericError("hyp2f1: z >= 1 is outside the convergence region");
  if (w > 1.0) throw DomainError("hyp2f1: z < 0 is not supported");
  // Terminating series are polynomials; evaluate them directly.
  if (is_nonpositive_integer(a) || is_nonpositive_integer(b) || w >= 0.5) {
    return hyp2f1_power_series(a, b, c, 1.0 - w);
  }
  return hyp2f1_connection(a, b, c, w);
}

double hyp2f1(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
  if (!(z < 1.0)) throw NumericError("hyp2f1: z >= 1 is outside the convergence region");
  if (z < 0.0) throw DomainError("hyp2f1: z < 0 is not supported");
  if (z <= 0.5) return hyp2f1_power_series(a, b, c, z);
  return hyp2f1_one_minus(a, b, c, 1.0 - z);
}

}  // namespace fdrelay::sfun
