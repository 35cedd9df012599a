#pragma once

// Monte Carlo oracle for the FD relay link. Samples Rayleigh-faded hops and
// the residual self-interference channel, then estimates outage and SER
// without using any closed form.
//
// Estimates are bit-identical for a given (seed, n, inputs) regardless of the
// number of worker threads: samples are grouped into fixed-size chunks, each
// chunk draws from per-sample counter streams, and chunk partials are reduced
// in chunk order.

#include <cstdint>

#include "fdrelay/model.hpp"
#include "fdrelay/rng.hpp"

namespace fdrelay::mc {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct McOptions {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline constexpr std::uint64_t kMinSamples = 10'000;
inline constexpr std::uint64_t kMinSymbols = 100'000;

struct Gammas {
  double sr;
  double rd;
  double li;
};

/// Independent exponential SNRs with means lambda_sr, lambda_rd, lambda_li
/// (inverse-CDF). gamma_li is exactly 0 when lambda_li is 0.
Gammas draw_gammas(const LinkStats& stats, rng::SampleStream& stream);

/// End-to-end SINR a b / (a + b + 1) with a = gamma_sr / (gamma_li + 1).
double sinr_exact(double gamma_sr, double gamma_rd, double gamma_li);

/// gamma_sr gamma_rd / (gamma_sr + (gamma_rd + 1)(gamma_li + 1)).
double sinr_approx(double gamma_sr, double gamma_rd, double gamma_li);

/// Fraction of draws with sinr_exact < threshold.
McEstimate estimate_outage(const LinkStats& stats, double threshold, const McOptions& opts);

/// Sample mean of alpha Q(sqrt(beta gamma)) over channel draws.
McEstimate estimate_ser_semianalytic(const LinkStats& stats, const Modulation& mod,
                                     const McOptions& opts);

/// End-to-end BPSK symbol simulation through the amplifying relay. The loop
/// interference carries an independent unit-power complex Gaussian signal.
/// Throws DomainError for non-BPSK modulation.
McEstimate estimate_ser_symbol_level(const LinkStats& stats, const Modulation& mod,
                                     const McOptions& opts);

}  // namespace fdrelay::mc
