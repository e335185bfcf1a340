#include "longtail/innovations.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "longtail/errors.hpp"
#include "longtail/stable.hpp"

namespace longtail {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Gaussian:
      return "gaussian";
    case Family::SymmetricStable:
      return "stable";
    case Family::StudentT:
      return "student";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "gaussian" || name == "normal") return Family::Gaussian;
  if (name == "stable" || name == "sas" || name == "symmetric_stable") return Family::SymmetricStable;
  if (name == "student" || name == "student_t" || name == "t") return Family::StudentT;
  throw InvalidArgument("unknown innovation family '" + std::string(name) + "'");
}

InnovationSpec InnovationSpec::gaussian(double sd) {
  return {Family::Gaussian, std::numeric_limits<double>::infinity(), sd};
}

InnovationSpec InnovationSpec::symmetric_stable(double alpha, double scale) {
  return {Family::SymmetricStable, alpha, scale};
}

InnovationSpec InnovationSpec::student_t(double dof, double scale) {
  return {Family::StudentT, dof, scale};
}

double InnovationSpec::alpha() const { return std::min(tail_index, 2.0); }

double InnovationSpec::tail_constant() const {
  using std::numbers::pi;
  const double nu = tail_index;
  switch (family) {
    case Family::Gaussian:
      return 0.0;
    case Family::SymmetricStable:
      return 2.0 * std::pow(scale, nu) * std::sin(pi * nu / 2.0) * boost::math::tgamma(nu) / pi;
    case Family::StudentT: {
      // P[T > x] ~ c_nu nu^{(nu-1)/2} x^-nu for the standard t density constant c_nu.
      const double log_c = boost::math::lgamma((nu + 1.0) / 2.0) - boost::math::lgamma(nu / 2.0) -
                           0.5 * std::log(nu * pi);
      return 2.0 * std::pow(scale, nu) * std::exp(log_c + 0.5 * (nu - 1.0) * std::log(nu));
    }
  }
  return 0.0;
}

double InnovationSpec::variance() const {
  switch (family) {
    case Family::Gaussian:
      return scale * scale;
    case Family::SymmetricStable:
      return std::numeric_limits<double>::infinity();
    case Family::StudentT:
      return tail_index > 2.0 ? scale * scale * tail_index / (tail_index - 2.0)
                              : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

void InnovationSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("innovation scale must be positive and finite");
  }
  if (!(tail_index > 1.0)) {
    throw InvalidArgument("innovation tail index must exceed 1");
  }
  switch (family) {
    case Family::Gaussian:
      if (!std::isinf(tail_index)) throw InvalidArgument("Gaussian innovations have tail index inf");
      break;
    case Family::SymmetricStable:
      if (!(tail_index < 2.0)) {
        throw InvalidArgument("stable innovations need 1 < nu < 2; use the Gaussian family for nu = 2");
      }
      break;
    case Family::StudentT:
      if (!std::isfinite(tail_index)) throw InvalidArgument("Student-t degrees of freedom must be finite");
      break;
  }
}

std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t count,
                                       std::uint64_t seed) {
  spec.validate();
  if (count == 0) throw InvalidArgument("innovation count must be positive");

  if (spec.family == Family::SymmetricStable) {
    return sample_sas(StableLaw(spec.tail_index, spec.scale), count, seed);
  }

  std::vector<double> out(count);
  std::mt19937_64 gen(seed);
  if (spec.family == Family::Gaussian) {
    std::normal_distribution<double> normal(0.0, spec.scale);
    for (auto& v : out) v = normal(gen);
  } else {
    std::student_t_distribution<double> student(spec.tail_index);
    for (auto& v : out) v = spec.scale * student(gen);
  }
  return out;
}

double innovation_tail(const InnovationSpec& spec, double x) {
  switch (spec.family) {
    case Family::Gaussian:
      return 0.5 * std::erfc(x / (spec.scale * std::numbers::sqrt2));
    case Family::SymmetricStable:
      return detail::stable_tail_any(spec.tail_index, spec.scale, x);
    case Family::StudentT: {
      boost::math::students_t_distribution<double> t(spec.tail_index);
      return boost::math::cdf(boost::math::complement(t, x / spec.scale));
    }
  }
  return 0.0;
}

double innovation_density(const InnovationSpec& spec, double x) {
  switch (spec.family) {
    case Family::Gaussian: {
      const double z = x / spec.scale;
      return std::exp(-0.5 * z * z) / (spec.scale * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::SymmetricStable:
      return detail::stable_pdf_any(spec.tail_index, spec.scale, x);
    case Family::StudentT: {
      boost::math::students_t_distribution<double> t(spec.tail_index);
      return boost::math::pdf(t, x / spec.scale) / spec.scale;
    }
  }
  return 0.0;
}

double moment_index(const InnovationSpec& spec) { return spec.tail_index; }

}  // namespace longtail
