#include "longtail/limit_theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "longtail/errors.hpp"
#include "longtail/statistics.hpp"

namespace longtail {

namespace {

void check_alpha_d(double alpha, double d) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (1, 2]");
  if (!(d > 0.0 && d < 1.0 - 1.0 / alpha)) throw InvalidArgument("d must lie in (0, 1 - 1/alpha)");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string text(value);
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
}

}  // namespace

double kappa(double gamma, double r, double d) {
  if (!(r > 0.0)) throw InvalidArgument("kappa needs r > 0");
  return 1.0 + 1.0 / r - (1.0 - d) * (1.0 + gamma);
}

std::string_view to_string(Regime regime) { return regime == Regime::A ? "A" : "B"; }

OptimalExponents optimal_exponents(double alpha, double d) {
  check_alpha_d(alpha, d);
  OptimalExponents out;
  const double s = 1.0 - d;
  if (1.0 / (s * (1.0 - 2.0 * d)) < alpha) {
    out.regime = Regime::A;
    out.gamma0 = d / s;
    out.r0 = alpha * s;
    out.kappa0 = 1.0 / (alpha * s);
  } else {
    out.regime = Regime::B;
    const double as = alpha * s;
    out.gamma0 = (as - 1.0) / (as + 1.0);
    out.r0 = 0.5 * (1.0 / s + alpha);
    out.kappa0 = regime_b_kappa_forms(alpha, d).shifted_form;
  }
  return out;
}

KappaForms regime_b_kappa_forms(double alpha, double d) {
  const double s = 1.0 - d;
  const double as = alpha * s;
  KappaForms forms;
  forms.ratio_form = (2.0 * s + 1.0 - as * (1.0 - 2.0 * d)) / (as + 1.0);
  forms.shifted_form = d + s * (3.0 - as) / (as + 1.0);
  return forms;
}

HardBound gamma_hard_bound(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (1, 2]");
  const double e = 1.0 - 1.0 / alpha;
  const double root = std::sqrt(9.0 - 8.0 * e);
  HardBound hb;
  hb.gamma_max = 8.0 * e / ((1.0 + root) * (3.0 + root));
  hb.d_star = (3.0 - root) / 4.0;
  return hb;
}

double limit_variance(double c_a, double var_eps, double d) {
  if (!(d > 0.0 && d < 0.5)) throw InvalidArgument("limit variance needs 0 < d < 1/2");
  if (!(var_eps > 0.0)) throw InvalidArgument("innovation variance must be positive");
  return c_a * c_a * var_eps * beta_function(1.0 - 2.0 * d, d) / (d * (2.0 * d + 1.0));
}

double memory_kernel_integral(double d, double alpha, double tol) {
  const double p = (1.0 - d) * alpha;
  if (!(d > 0.0) || !(p > 1.0)) throw InvalidArgument("memory kernel integral diverges: need (1 - d) alpha > 1");

  // v in [0, 1] contributes int (1-v)^{d alpha}; v = -w < 0 contributes
  // int_0^inf ((1+w)^d - w^d)^alpha dw.
  const double near = 1.0 / (d * alpha + 1.0);
  auto gap = [d](double w) {
    if (w <= 1.0) return std::pow(1.0 + w, d) - std::pow(w, d);
    return std::pow(w, d) * std::expm1(d * std::log1p(1.0 / w));
  };
  auto integrand = [&](double w) { return std::pow(gap(w), alpha); };

  boost::math::quadrature::tanh_sinh<double> ts;
  const double head = ts.integrate(integrand, 0.0, 1.0, tol);

  // [1, W] in log w; beyond W the integrand is d^alpha w^-p (1 + alpha(d-1)/(2w) + O(w^-2)).
  constexpr double W = 1e8;
  const double L = std::log(W);
  auto log_integrand = [&](double y) {
    const double w = std::exp(y);
    return integrand(w) * w;
  };
  double body = 0.0;
  constexpr int pieces = 24;
  for (int k = 0; k < pieces; ++k) {
    double err = 0.0;
    body += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(log_integrand, L * k / pieces,
                                                                          L * (k + 1) / pieces, 12, tol, &err);
  }
  const double tail =
      std::pow(d, alpha) * (std::pow(W, 1.0 - p) / (p - 1.0) + 0.5 * alpha * (d - 1.0) * std::pow(W, -p) / p);
  const double total = near + head + body + tail;
  if (!std::isfinite(total) || total <= 0.0) throw NumericError("memory kernel integral did not converge");
  return total;
}

double limit_scale(double c_a, double tail_const, double alpha, double d, double quad_tol) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw InvalidArgument("stable limit scale needs alpha in (1, 2); use limit_variance for alpha = 2");
  }
  check_alpha_d(alpha, d);
  if (!(tail_const > 0.0)) throw InvalidArgument("innovation tail constant must be positive");
  if (c_a == 0.0) throw InvalidArgument("c_a must be nonzero");
  // Gamma(2-a) cos(pi a/2) / (1-a) is positive on (1, 2): both factors of the ratio are negative.
  const double law_const =
      tail_const * boost::math::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0) / (1.0 - alpha);
  const double integral = memory_kernel_integral(d, alpha, quad_tol);
  return std::abs(c_a) / d * std::pow(law_const * integral, 1.0 / alpha);
}

double clt_rate(double alpha, double d) { return 1.0 - (d + 1.0 / alpha); }

StableLaw TheoryReport::limit_law() const {
  if (!eta_or_sigma2) throw InvalidArgument("theory report carries no limit-law parameter");
  if (gaussian_limit()) return StableLaw(2.0, std::sqrt(*eta_or_sigma2 / 2.0));
  return StableLaw(alpha, *eta_or_sigma2);
}

TheoryReport make_theory_report(double alpha, double d, std::optional<double> c_a,
                                std::optional<double> innovation_const) {
  const auto opt = optimal_exponents(alpha, d);
  TheoryReport rep;
  rep.alpha = alpha;
  rep.d = d;
  rep.regime = opt.regime;
  rep.gamma0 = opt.gamma0;
  rep.r0 = opt.r0;
  rep.kappa0 = opt.kappa0;
  rep.rate_exponent = clt_rate(alpha, d);
  const auto hb = gamma_hard_bound(alpha);
  rep.gamma_hard_bound = hb.gamma_max;
  rep.d_star = hb.d_star;
  if (c_a && innovation_const) {
    rep.eta_or_sigma2 = alpha >= 2.0 ? limit_variance(*c_a, *innovation_const, d)
                                     : limit_scale(*c_a, *innovation_const, alpha, d);
  }
  return rep;
}

std::string serialize(const TheoryReport& r) {
  std::ostringstream out;
  out << "alpha=" << format_double(r.alpha) << '\n'
      << "d=" << format_double(r.d) << '\n'
      << "regime=" << to_string(r.regime) << '\n'
      << "gamma0=" << format_double(r.gamma0) << '\n'
      << "r0=" << format_double(r.r0) << '\n'
      << "kappa0=" << format_double(r.kappa0) << '\n'
      << "rate_exponent=" << format_double(r.rate_exponent) << '\n'
      << "gamma_hard_bound=" << format_double(r.gamma_hard_bound) << '\n'
      << "d_star=" << format_double(r.d_star) << '\n';
  if (r.eta_or_sigma2) out << "eta_or_sigma2=" << format_double(*r.eta_or_sigma2) << '\n';
  return out.str();
}

TheoryReport parse_theory_report(std::string_view text) {
  TheoryReport r;
  bool have_alpha = false;
  bool have_d = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("theory report line without '=': " + std::string(line));
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "regime") {
      if (value == "A") {
        r.regime = Regime::A;
      } else if (value == "B") {
        r.regime = Regime::B;
      } else {
        throw ConfigError("regime must be A or B");
      }
      continue;
    }
    const double v = parse_number(key, value);
    if (key == "alpha") {
      r.alpha = v;
      have_alpha = true;
    } else if (key == "d") {
      r.d = v;
      have_d = true;
    } else if (key == "gamma0") {
      r.gamma0 = v;
    } else if (key == "r0") {
      r.r0 = v;
    } else if (key == "kappa0") {
      r.kappa0 = v;
    } else if (key == "rate_exponent") {
      r.rate_exponent = v;
    } else if (key == "gamma_hard_bound") {
      r.gamma_hard_bound = v;
    } else if (key == "d_star") {
      r.d_star = v;
    } else if (key == "eta_or_sigma2") {
      r.eta_or_sigma2 = v;
    } else {
      throw ConfigError("unknown theory report key: " + std::string(key));
    }
  }
  if (!have_alpha || !have_d) throw ConfigError("theory report needs alpha and d");
  return r;
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::HeavyPower:
      return "HeavyPower";
    case ScheduleKind::LightLog:
      return "LightLog";
    case ScheduleKind::RandomK:
      return "RandomK";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
  if (name == "HeavyPower") return ScheduleKind::HeavyPower;
  if (name == "LightLog") return ScheduleKind::LightLog;
  if (name == "RandomK") return ScheduleKind::RandomK;
  throw ConfigError("unknown schedule kind: " + std::string(name));
}

double ThresholdSchedule::threshold(std::size_t n) const {
  if (n == 0) throw InvalidArgument("threshold needs n >= 1");
  const double nd = static_cast<double>(n);
  if (base == ScheduleKind::LightLog) return prefactor * std::pow(beta * std::log(nd) * log_factor, 1.0 / beta);
  return prefactor * std::pow(nd, theta);
}

std::size_t ThresholdSchedule::random_k(std::size_t n, double p_exceed) {
  if (!(p_exceed >= 0.0 && p_exceed <= 1.0)) throw InvalidArgument("exceedance probability must lie in [0, 1]");
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * p_exceed));
}

ThresholdSchedule make_schedule(ScheduleKind kind, const TheoryReport& theory, double nu,
                                const ScheduleOptions& options) {
  if (!(options.prefactor > 0.0)) throw InvalidArgument("schedule prefactor must be positive");
  if (options.delta && !(*options.delta > 0.0)) throw InvalidArgument("delta must be positive");

  ThresholdSchedule s;
  s.kind = kind;
  s.base = kind == ScheduleKind::RandomK ? options.random_base : kind;
  if (s.base == ScheduleKind::RandomK) throw InvalidArgument("RandomK needs a deterministic base rule");
  s.prefactor = options.prefactor;

  if (s.base == ScheduleKind::HeavyPower) {
    if (!(nu > 1.0) || !std::isfinite(nu)) throw InvalidArgument("HeavyPower needs a finite tail index nu > 1");
    const double gap = theory.d + 1.0 / theory.alpha - theory.kappa0;
    if (!(gap > 0.0)) throw NumericError("d + 1/alpha - kappa0 <= 0: inconsistent optimal exponents");
    s.delta = options.delta.value_or(0.1 * gap);
    s.theta_bound = gap / (nu + 1.0);
    if (options.theta) {
      s.theta = *options.theta;
    } else {
      if (!(gap - 2.0 * s.delta > 0.0)) throw InvalidArgument("delta too large: threshold exponent not positive");
      s.theta = (gap - 2.0 * s.delta) / (nu + 1.0);
    }
    s.admissible = s.theta < s.theta_bound;
  } else {
    if (!(options.beta > 0.0)) throw InvalidArgument("beta must be positive");
    const double gap = 0.5 + theory.d - theory.kappa0;
    if (!(gap > 0.0)) throw NumericError("1/2 + d - kappa0 <= 0: no admissible logarithmic threshold");
    s.beta = options.beta;
    s.delta = options.delta.value_or(0.1 * gap);
    s.log_factor = gap - s.delta;
    if (!(s.log_factor > 0.0)) throw InvalidArgument("delta too large: logarithmic factor not positive");
    // u^beta grows like prefactor^beta * beta * log(n) * log_factor.
    const double effective = std::pow(s.prefactor, s.beta) * s.log_factor;
    s.admissible = effective < gap;
  }
  return s;
}

}  // namespace longtail
