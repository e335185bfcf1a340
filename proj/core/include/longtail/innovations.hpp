#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace longtail {

enum class Family { Gaussian, SymmetricStable, StudentT };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Law of the i.i.d. innovations driving the linear process.
///
/// All supported laws are symmetric about zero. `scale` is the standard
/// deviation for Gaussian, the stable scale (characteristic function
/// exp(-|scale * t|^nu)) for SymmetricStable, and a multiplier of the
/// standard t variate for StudentT.
struct InnovationSpec {
  Family family = Family::Gaussian;
  double tail_index = std::numeric_limits<double>::infinity();
  double scale = 1.0;

  static InnovationSpec gaussian(double sd = 1.0);
  static InnovationSpec symmetric_stable(double alpha, double scale = 1.0);
  static InnovationSpec student_t(double dof, double scale = 1.0);

  /// min(nu, 2): the stability index of the partial-sum limit.
  double alpha() const;

  /// Constant A with lim x^nu P[eps > x] = A / 2. Zero for Gaussian.
  double tail_constant() const;

  /// E[eps^2]; infinite when nu <= 2.
  double variance() const;

  /// Throws InvalidArgument unless nu > 1, scale > 0 and the family-specific
  /// range holds (1 < nu <= 2 for SymmetricStable, nu = inf for Gaussian).
  void validate() const;
};

/// Draws `count` i.i.d. innovations. Bit-identical for identical arguments.
std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t count,
                                       std::uint64_t seed);

/// P[eps > x].
double innovation_tail(const InnovationSpec& spec, double x);

/// Density of eps at x.
double innovation_density(const InnovationSpec& spec, double x);

/// Algebraic moment index sup{p > 1 : E|eps|^p < inf}.
double moment_index(const InnovationSpec& spec);

}  // namespace longtail
