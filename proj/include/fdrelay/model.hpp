#pragma once

// Scenario description for a two-hop full-duplex amplify-and-forward link and
// the mapping from (scenario, allocation) to the average per-hop SNRs.
//
// All powers are normalised to the receiver noise power, which is fixed at 1.

#include <cmath>
#include <optional>

namespace fdrelay {

/// Linear-modulation constants for SER = alpha * E[Q(sqrt(beta * gamma))].
struct Modulation {
  double alpha = 1.0;
  double beta = 2.0;

  static constexpr Modulation bpsk() { return {1.0, 2.0}; }
  bool is_bpsk() const { return alpha == 1.0 && beta == 2.0; }
};

struct SystemConfig {
  double total_power = 100.0;  // P, linear
  double rsi_level = 0.0;      // epsilon
  double pathloss_exp = 3.0;   // v
  double sum_distance = 1.0;   // D = D_SR + D_RD
  // Source-destination distance. Recorded for completeness; the direct link is
  // assumed fully blocked and never enters a formula.
  std::optional<double> direct_distance;
  Modulation modulation = Modulation::bpsk();

  static constexpr double kNoisePower = 1.0;

  /// Throws DomainError when any invariant is violated.
  void validate() const;
};

/// Power split rho_lambda = P_S / P and relay position rho_d = D_SR / D.
class Allocation {
 public:
  static constexpr double kMinRatio = 1e-6;
  static constexpr double kMaxRatio = 1.0 - 1e-6;

  Allocation() = default;
  /// Ratios are clamped into [kMinRatio, kMaxRatio]; clamped() reports it.
  /// NaN inputs throw DomainError.
  Allocation(double rho_lambda, double rho_d);

  double rho_lambda() const { return rho_lambda_; }
  double rho_d() const { return rho_d_; }
  bool clamped() const { return clamped_; }

  double source_power(const SystemConfig& cfg) const { return rho_lambda_ * cfg.total_power; }
  double relay_power(const SystemConfig& cfg) const {
    return cfg.total_power - source_power(cfg);
  }
  double sr_distance(const SystemConfig& cfg) const { return rho_d_ * cfg.sum_distance; }
  double rd_distance(const SystemConfig& cfg) const {
    return cfg.sum_distance - sr_distance(cfg);
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  double rho_lambda_ = 0.5;
  double rho_d_ = 0.5;
  bool clamped_ = false;
};

/// Average SNRs of the source-relay, relay-destination and loop-interference
/// channels, plus eta = lambda_li / lambda_sr.
struct LinkStats {
  double lambda_sr = 1.0;
  double lambda_rd = 1.0;
  double lambda_li = 0.0;
  double eta = 0.0;

  /// Builds stats from the three means, deriving eta. Throws DomainError unless
  /// lambda_sr, lambda_rd > 0 and lambda_li >= 0.
  static LinkStats from_means(double lambda_sr, double lambda_rd, double lambda_li);
};

LinkStats link_stats(const SystemConfig& cfg, const Allocation& alloc);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace fdrelay
