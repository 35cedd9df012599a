#include "fdrelay/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdrelay/error.hpp"

namespace fdrelay {

void SystemConfig::validate() const {
  if (!(total_power > 0.0) || !std::isfinite(total_power)) {
    throw DomainError("total power must be positive and finite");
  }
  if (!(rsi_level >= 0.0) || !std::isfinite(rsi_level)) {
    throw DomainError("RSI level must be nonnegative and finite");
  }
  if (!(pathloss_exp > 1.0) || !std::isfinite(pathloss_exp)) {
    throw DomainError("path-loss exponent must exceed 1");
  }
  if (!(sum_distance > 0.0) || !std::isfinite(sum_distance)) {
    throw DomainError("sum distance must be positive and finite");
  }
  if (direct_distance && !(*direct_distance > 0.0)) {
    throw DomainError("direct distance must be positive when given");
  }
  if (!(modulation.alpha > 0.0) || !(modulation.beta > 0.0)) {
    throw DomainError("modulation constants must be positive");
  }
}

Allocation::Allocation(double rho_lambda, double rho_d) {
  if (std::isnan(rho_lambda) || std::isnan(rho_d)) {
    throw DomainError("allocation ratios must not be NaN");
  }
  rho_lambda_ = std::clamp(rho_lambda, kMinRatio, kMaxRatio);
  rho_d_ = std::clamp(rho_d, kMinRatio, kMaxRatio);
  clamped_ = rho_lambda_ != rho_lambda || rho_d_ != rho_d;
}

LinkStats LinkStats::from_means(double lambda_sr, double lambda_rd, double lambda_li) {
  if (!(lambda_sr > 0.0) || !(lambda_rd > 0.0)) {
    throw DomainError("link means lambda_sr and lambda_rd must be positive");
  }
  if (!(lambda_li >= 0.0)) throw DomainError("interference mean must be nonnegative");
  return {lambda_sr, lambda_rd, lambda_li, lambda_li / lambda_sr};
}

LinkStats link_stats(const SystemConfig& cfg, const Allocation& alloc) {
  cfg.validate();
  const double v = cfg.pathloss_exp;
  const double ps = alloc.source_power(cfg);
  const double pr = alloc.relay_power(cfg);
  const double lambda_sr = ps * std::pow(alloc.sr_distance(cfg), -v);
  const double lambda_rd = pr * std::pow(alloc.rd_distance(cfg), -v);
  const double lambda_li = cfg.rsi_level * pr;
  return LinkStats::from_means(lambda_sr, lambda_rd, lambda_li);
}

}  // namespace fdrelay
