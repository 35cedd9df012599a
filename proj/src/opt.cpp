#include "fdrelay/opt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdrelay/analytic.hpp"
#include "fdrelay/error.hpp"

namespace fdrelay::opt {

namespace {

constexpr int kScanCells = 10000;
constexpr int kTailCells = 1000;
constexpr double kRootTol = 1e-12;
constexpr double kMergeTol = 1e-9;

void require_ratio(double r, const char* what) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError(std::string(what) + " must lie in (0, 1)");
}

double ser_at(const SystemConfig& cfg, const Allocation& alloc) {
  return analytic::ser_series(link_stats(cfg, alloc), cfg.modulation);
}

double joint_residual(const SystemConfig& cfg, const Allocation& alloc) {
  const auto g = analytic::f_gradient(alloc, cfg);
  return std::max(std::abs(g.d_rho_lambda), std::abs(g.d_rho_d));
}

double free_residual(Objective objective, const SystemConfig& cfg, const Allocation& alloc) {
  const auto g = analytic::f_gradient(alloc, cfg);
  return std::abs(objective == Objective::location ? g.d_rho_d : g.d_rho_lambda);
}

Allocation make_alloc(Objective objective, double free_ratio, double fixed_ratio) {
  return objective == Objective::location ? Allocation(fixed_ratio, free_ratio)
                                          : Allocation(free_ratio, fixed_ratio);
}

// Reduced stationarity condition in the relay power fraction r = P_R / P:
// (1 + eps P r)^v (1/r - 1)^(v-2) = (1 + eps P)^(v-1), in log form.
double reduced_condition(const SystemConfig& cfg, double r) {
  const double v = cfg.pathloss_exp;
  const double ep = cfg.rsi_level * cfg.total_power;
  return v * std::log1p(ep * r) + (v - 2.0) * (std::log1p(-r) - std::log(r)) -
         (v - 1.0) * std::log1p(ep);
}

// 10^4 uniform cells on (0, 1) plus log-spaced cells down to 1e-13 from either
// end, where the extra roots sit once eps P is large.
const std::vector<double>& scan_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int k = 1; k < kScanCells; ++k) g.push_back(static_cast<double>(k) / kScanCells);
    const double top = std::log10(1.0 / kScanCells);
    for (int j = 1; j <= kTailCells; ++j) {
      const double r = std::pow(10.0, top - 9.0 * j / kTailCells);
      g.push_back(r);
      g.push_back(1.0 - r);
    }
    std::sort(g.begin(), g.end());
    return g;
  }();
  return grid;
}

// Location paired with relay power fraction r.
double paired_location(const SystemConfig& cfg, double r) {
  const double v = cfg.pathloss_exp;
  const double ep = cfg.rsi_level * cfg.total_power;
  return 1.0 / (1.0 + std::pow((1.0 + ep * r) * r / (1.0 - r), 1.0 / (v - 1.0)));
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::closed_form:
      return "closed_form";
    case Method::golden_section:
      return "golden_section";
    case Method::joint_roots:
      return "joint_roots";
    case Method::joint_particular:
      return "joint_particular";
  }
  return "unknown";
}

double optimal_location_closed(const SystemConfig& cfg, double rho_lambda) {
  require_ratio(rho_lambda, "optimal_location_closed: power ratio");
  const double ps = rho_lambda * cfg.total_power;
  const double pr = cfg.total_power - ps;
  const double ratio = (1.0 + cfg.rsi_level * pr) * pr / ps;
  return 1.0 / (1.0 + std::pow(ratio, 1.0 / (cfg.pathloss_exp - 1.0)));
}

double optimal_power_closed(const SystemConfig& cfg, double rho_d) {
  require_ratio(rho_d, "optimal_power_closed: location ratio");
  constexpr double b0 = 1.0;
  const double v = cfg.pathloss_exp;
  const double dsr_v = std::pow(rho_d * cfg.sum_distance, v);
  const double drd_v = std::pow((1.0 - rho_d) * cfg.sum_distance, v);
  const double ratio = drd_v / (dsr_v + cfg.total_power * b0 * cfg.rsi_level * dsr_v);
  return 1.0 / (1.0 + std::sqrt(ratio));
}

OptResult closed_form_1d(Objective objective, const SystemConfig& cfg, double fixed_ratio) {
  const double free = objective == Objective::location
                          ? optimal_location_closed(cfg, fixed_ratio)
                          : optimal_power_closed(cfg, fixed_ratio);
  OptResult out;
  out.allocation = make_alloc(objective, free, fixed_ratio);
  out.ser = ser_at(cfg, out.allocation);
  out.method = Method::closed_form;
  out.foc_residual = free_residual(objective, cfg, out.allocation);
  return out;
}

OptResult minimize_1d(Objective objective, const SystemConfig& cfg, double fixed_ratio,
                      double tol) {
  require_ratio(fixed_ratio, "minimize_1d: fixed ratio");
  if (!(tol >= 1e-10 && tol <= 1e-2)) {
    throw DomainError("minimize_1d: tol must be in [1e-10, 1e-2]");
  }
  cfg.validate();

  auto objective_at = [&](double x) {
    const double s = ser_at(cfg, make_alloc(objective, x, fixed_ratio));
    if (!std::isfinite(s)) {
      throw NumericError("minimize_1d: objective is not finite at " + std::to_string(x));
    }
    return s;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = Allocation::kMinRatio;
  double hi = Allocation::kMaxRatio;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective_at(x1);
  double f2 = objective_at(x2);
  int iterations = 0;
  while (hi - lo > tol) {
    ++iterations;
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective_at(x2);
    }
  }

  OptResult out;
  out.allocation = make_alloc(objective, 0.5 * (lo + hi), fixed_ratio);
  out.ser = ser_at(cfg, out.allocation);
  out.method = Method::golden_section;
  out.foc_residual = free_residual(objective, cfg, out.allocation);
  out.iterations = iterations;
  out.bracket_width = hi - lo;
  return out;
}

Allocation particular_joint_solution(const SystemConfig& cfg) {
  const double s = std::sqrt(1.0 + cfg.rsi_level * cfg.total_power);
  return Allocation(s / (s + 1.0), 0.5);
}

std::vector<Allocation> joint_foc_roots(const SystemConfig& cfg) {
  cfg.validate();
  const Allocation particular = particular_joint_solution(cfg);
  const double ep = cfg.rsi_level * cfg.total_power;
  if (cfg.pathloss_exp == 2.0 && ep == 0.0) return {particular};

  std::vector<double> relay_fracs;
  auto refine = [&](double lo, double hi) {
    double g_lo = reduced_condition(cfg, lo);
    while (hi - lo > kRootTol * std::min(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double g_mid = reduced_condition(cfg, mid);
      if (g_mid == 0.0) return mid;
      if ((g_mid < 0.0) == (g_lo < 0.0)) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  const auto& grid = scan_grid();
  double prev_r = grid.front();
  double prev_g = reduced_condition(cfg, prev_r);
  if (prev_g == 0.0) relay_fracs.push_back(prev_r);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double r = grid[k];
    const double g = reduced_condition(cfg, r);
    if (g == 0.0) {
      relay_fracs.push_back(r);
    } else if (prev_g != 0.0 && (g < 0.0) != (prev_g < 0.0)) {
      relay_fracs.push_back(refine(prev_r, r));
    }
    prev_r = r;
    prev_g = g;
  }

  // The particular solution is an exact root; it replaces scan hits that are
  // within one uniform cell of it.
  const double particular_r = 1.0 - particular.rho_lambda();
  std::erase_if(relay_fracs, [&](double r) {
    return std::abs(r - particular_r) < 1.0 / kScanCells;
  });
  relay_fracs.push_back(particular_r);
  std::sort(relay_fracs.begin(), relay_fracs.end());
  std::vector<double> unique;
  for (double r : relay_fracs) {
    if (unique.empty() || r - unique.back() > kMergeTol) unique.push_back(r);
  }

  auto representable = [](double ratio) {
    return ratio >= Allocation::kMinRatio && ratio <= Allocation::kMaxRatio;
  };
  std::vector<Allocation> out;
  out.reserve(unique.size());
  for (double r : unique) {
    if (r == particular_r) {
      out.push_back(particular);
      continue;
    }
    const double rho_lambda = 1.0 - r;
    const double rho_d = paired_location(cfg, r);
    // Clamping would move the point off the root.
    if (representable(rho_lambda) && representable(rho_d)) out.emplace_back(rho_lambda, rho_d);
  }
  std::sort(out.begin(), out.end(), [](const Allocation& a, const Allocation& b) {
    return a.rho_lambda() < b.rho_lambda();
  });
  return out;
}

std::vector<double> joint_v3_closed(const SystemConfig& cfg) {
  if (cfg.pathloss_exp != 3.0) throw DomainError("joint_v3_closed: requires v = 3");
  const double ep = cfg.rsi_level * cfg.total_power;
  const double s = std::sqrt(1.0 + ep);
  std::vector<double> out{s / (s + 1.0)};
  if (ep >= 3.0) {
    // eps^2 P^2 - 2 eps P - 3 = (eps P - 3)(eps P + 1)
    const double root = std::sqrt((ep - 3.0) * (ep + 1.0));
    for (double cand : {(1.0 + ep + root) / (2.0 * ep), (1.0 + ep - root) / (2.0 * ep)}) {
      if (cand > 0.0 && cand < 1.0) out.push_back(cand);
    }
  }
  return out;
}

OptResult select_joint_optimum(const SystemConfig& cfg) {
  const Allocation particular = particular_joint_solution(cfg);
  const auto candidates = joint_foc_roots(cfg);

  OptResult best;
  best.allocation = particular;
  best.ser = ser_at(cfg, particular);
  best.method = Method::joint_particular;
  for (const auto& cand : candidates) {
    if (cand == particular) continue;
    const double s = ser_at(cfg, cand);
    if (s < best.ser) {
      best.allocation = cand;
      best.ser = s;
      best.method = Method::joint_roots;
    }
  }
  best.foc_residual = joint_residual(cfg, best.allocation);
  best.iterations = static_cast<int>(candidates.size());
  return best;
}

Allocation sequential_v2(const SystemConfig& cfg) {
  if (cfg.pathloss_exp != 2.0) throw DomainError("sequential_v2: requires v = 2");
  const double s = std::sqrt(1.0 + cfg.rsi_level * cfg.total_power);
  return Allocation(s / (s + 1.0), 0.5);
}

}  // namespace fdrelay::opt
