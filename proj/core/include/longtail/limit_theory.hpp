#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "longtail/stable.hpp"

namespace longtail {

/// Exponent of the L^r residual bound: 1 + 1/r - (1 - d)(1 + gamma).
double kappa(double gamma, double r, double d);

/// RegimeA when 1/((1-d)(1-2d)) < alpha, RegimeB otherwise.
enum class Regime { A, B };
std::string_view to_string(Regime regime);

struct OptimalExponents {
  double gamma0 = 0.0;
  double r0 = 0.0;
  double kappa0 = 0.0;
  Regime regime = Regime::A;
};

/// Closed-form minimiser of kappa over
///   0 <= gamma <= min{d/(1-d), 1 - 1/(r(1-d)), alpha/r - 1},
///   1/(1-d) <= r <= alpha.
/// Requires alpha in (1, 2] and d in (0, 1 - 1/alpha).
OptimalExponents optimal_exponents(double alpha, double d);

/// The two algebraic expressions of kappa0 in RegimeB:
/// (2(1-d) + 1 - alpha(1-d)(1-2d)) / (alpha(1-d)+1) and
/// d + (1-d)(3 - alpha(1-d)) / (alpha(1-d)+1).
struct KappaForms {
  double ratio_form = 0.0;
  double shifted_form = 0.0;
};
KappaForms regime_b_kappa_forms(double alpha, double d);

/// Largest attainable growth exponent gamma over d in (0, 1 - 1/alpha), and
/// the memory parameter d* attaining it.
struct HardBound {
  double gamma_max = 0.0;
  double d_star = 0.0;
};
HardBound gamma_hard_bound(double alpha);

/// Variance of the Gaussian partial-sum limit (alpha = 2, 0 < d < 1/2).
double limit_variance(double c_a, double var_eps, double d);

/// int_{-inf}^{1} ((1-v)_+^d - (-v)_+^d)^alpha dv.
double memory_kernel_integral(double d, double alpha, double tol = 1e-12);

/// Scale eta of the SaS partial-sum limit, alpha in (1, 2).
double limit_scale(double c_a, double tail_const, double alpha, double d, double quad_tol = 1e-12);

/// 1 - (d + 1/alpha).
double clt_rate(double alpha, double d);

/// Everything the limit theorems need for one (alpha, d) pair.
struct TheoryReport {
  double alpha = 2.0;
  double d = 0.1;
  Regime regime = Regime::A;
  double gamma0 = 0.0;
  double r0 = 0.0;
  double kappa0 = 0.0;
  double rate_exponent = 0.0;
  double gamma_hard_bound = 0.0;
  double d_star = 0.0;
  /// eta for alpha < 2, sigma^2 for alpha = 2; absent when the innovation
  /// constants were not supplied.
  std::optional<double> eta_or_sigma2;

  bool gaussian_limit() const { return alpha >= 2.0; }
  /// Limit law of n^{-d-1/alpha} sum X_t (requires eta_or_sigma2).
  StableLaw limit_law() const;
};

/// `c_a` and `innovation_const` (A for alpha < 2, E[eps^2] for alpha = 2)
/// are optional; without them the report has no limit-law parameter.
TheoryReport make_theory_report(double alpha, double d, std::optional<double> c_a = std::nullopt,
                                std::optional<double> innovation_const = std::nullopt);

/// Flat `key=value` block, one key per line in the order alpha, d, regime,
/// gamma0, r0, kappa0, rate_exponent, gamma_hard_bound, d_star, eta_or_sigma2.
std::string serialize(const TheoryReport& report);
TheoryReport parse_theory_report(std::string_view text);

enum class ScheduleKind { HeavyPower, LightLog, RandomK };
std::string_view to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(std::string_view name);

/// Threshold rule u_n, or k(n) = floor(n P[X_0 > u_n]) for RandomK.
struct ThresholdSchedule {
  ScheduleKind kind = ScheduleKind::HeavyPower;
  /// Kind of the deterministic rule u_n; equals `kind` unless RandomK.
  ScheduleKind base = ScheduleKind::HeavyPower;
  double prefactor = 1.0;
  double theta = 0.0;        // HeavyPower exponent
  double theta_bound = 0.0;  // strict admissibility bound on theta
  double beta = 2.0;         // LightLog
  double log_factor = 0.0;   // LightLog: 1/2 + d - kappa0 - delta
  double delta = 0.0;
  bool admissible = true;

  /// Deterministic threshold u_n.
  double threshold(std::size_t n) const;
  /// k = floor(n * p_exceed) where p_exceed = P[X_0 > u_n].
  static std::size_t random_k(std::size_t n, double p_exceed);
};

struct ScheduleOptions {
  /// Defaults to 0.1 of the admissibility gap when absent.
  std::optional<double> delta;
  double prefactor = 1.0;
  double beta = 2.0;
  /// User-chosen HeavyPower exponent; checked against the bound, never clamped.
  std::optional<double> theta;
  /// Deterministic rule behind RandomK.
  ScheduleKind random_base = ScheduleKind::HeavyPower;
};

/// `nu` is the tail index of X_0 (ignored for LightLog).
ThresholdSchedule make_schedule(ScheduleKind kind, const TheoryReport& theory, double nu,
                                const ScheduleOptions& options = {});

}  // namespace longtail
