#pragma once

// Relay-location, power-split and joint optimizers for the minimal-SER
// criterion.

#include <string_view>
#include <vector>

#include "fdrelay/model.hpp"

namespace fdrelay::opt {

enum class Method { closed_form, golden_section, joint_roots, joint_particular };

std::string_view to_string(Method m);

struct OptResult {
  Allocation allocation;
  double ser = 0.0;  // ser_series at the allocation
  Method method = Method::closed_form;
  // Largest |partial derivative| of f_objective in the free variable(s).
  // Nonzero for closed forms at finite power is expected.
  double foc_residual = 0.0;
  int iterations = 0;
  double bracket_width = 0.0;  // golden_section only
};

enum class Objective { location, power };

/// High-power optimal relay location for a fixed power split.
double optimal_location_closed(const SystemConfig& cfg, double rho_lambda);

/// High-power optimal power split for a fixed relay location.
double optimal_power_closed(const SystemConfig& cfg, double rho_d);

/// Closed-form single-variable optimum wrapped as an OptResult.
OptResult closed_form_1d(Objective objective, const SystemConfig& cfg, double fixed_ratio);

/// Golden-section minimization of ser_series over the free ratio in
/// [1e-6, 1 - 1e-6] with the other ratio held at fixed_ratio. Stops once the
/// bracket is no wider than tol.
OptResult minimize_1d(Objective objective, const SystemConfig& cfg, double fixed_ratio,
                      double tol = 1e-8);

/// The particular joint stationary point rho_lambda = s / (s + 1),
/// rho_d = 1/2 with s = sqrt(1 + eps P).
Allocation particular_joint_solution(const SystemConfig& cfg);

/// All stationary points of f_objective in the open unit square, sorted by
/// rho_lambda. Roots of the reduced equation in the relay power fraction are
/// found by a sign scan (10^4 uniform cells plus log-spaced cells near both
/// ends) with bisection to 1e-12. The particular solution is always included
/// and absorbs scan roots within one uniform cell of it. Roots whose ratios fall
/// outside [Allocation::kMinRatio, Allocation::kMaxRatio] are dropped. When the
/// equation is identically satisfied (v = 2, eps P = 0) the particular solution
/// is returned alone.
std::vector<Allocation> joint_foc_roots(const SystemConfig& cfg);

/// Closed-form power splits at the stationary points for v = 3. Throws
/// DomainError for any other exponent.
std::vector<double> joint_v3_closed(const SystemConfig& cfg);

/// Evaluates ser_series at every stationary point and returns the best;
/// ties go to the particular solution.
OptResult select_joint_optimum(const SystemConfig& cfg);

/// Location-then-power sequential optimum, closed form for v = 2. Throws
/// DomainError for any other exponent.
Allocation sequential_v2(const SystemConfig& cfg);

}  // namespace fdrelay::opt
