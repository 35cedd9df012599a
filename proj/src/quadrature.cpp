#include "fdrelay/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "fdrelay/error.hpp"
#include "fdrelay/sfun.hpp"

namespace fdrelay::quad {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208931996538, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(centre);
  double kronrod = kKronrodWeights[10] * fc;
  double gauss = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& opts) {
  if (!(hi >= lo)) throw DomainError("integrate: empty or reversed interval");
  if (hi == lo) return {};

  std::priority_queue<Segment> heap;
  heap.push(gauss_kronrod(f, lo, hi));
  double total = heap.top().value;
  double error = heap.top().error;
  int intervals = 1;

  auto converged = [&] {
    return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  };
  while (!converged()) {
    if (intervals >= opts.max_intervals) {
      throw NumericError("integrate: tolerance not reached, achieved error " +
                             std::to_string(error),
                         error);
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Segment left = gauss_kronrod(f, worst.lo, mid);
    const Segment right = gauss_kronrod(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (mid <= worst.lo || mid >= worst.hi) break;  // interval below resolution
  }

  // Re-sum to shed drift from the incremental updates.
  sfun::CompensatedSum value;
  sfun::CompensatedSum err;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  QuadratureResult out{value.value(), err.value(), intervals};
  if (!(out.abs_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value)))) {
    throw NumericError("integrate: tolerance not reached, achieved error " +
                           std::to_string(out.abs_error),
                       out.abs_error);
  }
  return out;
}

QuadratureResult integrate_half_line(const std::function<double(double)>& f, double scale,
                                     const QuadratureOptions& opts) {
  if (!(scale > 0.0)) throw DomainError("integrate_half_line: scale must be positive");
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    if (one_minus <= 0.0) return 0.0;
    const double t = scale * s / one_minus;
    const double v = f(t);
    if (v == 0.0) return 0.0;
    return v * scale / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace fdrelay::quad
