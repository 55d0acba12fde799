#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "experts/rng.hpp"

namespace experts {

enum class NoiseFamily { Uniform, Exponential, Gumbel, PointMassZero };

/// How noise enters the leader comparison: argmin(L - p) or argmin(L + p).
enum class NoiseSign { Subtract, Add };

/// Noise law for perturbed-leader algorithms.
///
///  - Uniform: support [0, scale].
///  - Exponential: rate `scale`, density scale·e^{-scale·x} on [0, ∞).
///  - Gumbel: location `location`, scale `scale`, max-type
///    (CDF exp(-exp(-(x-μ)/β))).
///  - PointMassZero: always 0; `scale` is ignored.
struct PerturbationSpec {
  NoiseFamily family = NoiseFamily::PointMassZero;
  double scale = 1.0;
  double location = 0.0;
  NoiseSign sign = NoiseSign::Subtract;

  static PerturbationSpec uniform(double width, NoiseSign s = NoiseSign::Subtract) {
    return {NoiseFamily::Uniform, width, 0.0, s};
  }
  static PerturbationSpec exponential(double rate, NoiseSign s = NoiseSign::Subtract) {
    return {NoiseFamily::Exponential, rate, 0.0, s};
  }
  static PerturbationSpec gumbel(double scale, double location = 0.0,
                                 NoiseSign s = NoiseSign::Subtract) {
    return {NoiseFamily::Gumbel, scale, location, s};
  }
  static PerturbationSpec zero(NoiseSign s = NoiseSign::Subtract) {
    return {NoiseFamily::PointMassZero, 1.0, 0.0, s};
  }

  bool stochastic() const noexcept { return family != NoiseFamily::PointMassZero; }
  bool nonnegative() const noexcept { return family != NoiseFamily::Gumbel; }

  /// Throws ConfigError for a non-positive or non-finite scale on a
  /// stochastic family, or a non-finite location.
  void validate() const;

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

std::string_view to_string(NoiseFamily f);
std::string_view to_string(NoiseSign s);
/// Accepts "uniform", "exponential", "gumbel", "zero"/"point-mass-zero".
NoiseFamily parse_noise_family(std::string_view name);
NoiseSign parse_noise_sign(std::string_view name);

/// One draw. Gumbel uses μ − β·ln(−ln U), exponential −ln(U)/ε, with U
/// uniform on (0, 1).
double sample(const PerturbationSpec& spec, RngStream& rng);

double density(const PerturbationSpec& spec, double x);
/// P(X > x).
double survival(const PerturbationSpec& spec, double x);

/// Closed-form probability that the expert trailing by c >= 0 wins a
/// two-expert perturbed comparison, P(c + d_i <= d_j) for i.i.d. d:
///   Exponential(ε): ½·e^{-εc}
///   Uniform(ε):     (ε − c)² / (2ε²) for c <= ε, else 0
///   Gumbel(β):      e^{-c/β} / (1 + e^{-c/β})
/// Throws ConfigError for PointMassZero and DomainError for c < 0.
double pair_probability_closed_form(const PerturbationSpec& spec, double c);

struct QuadratureOptions {
  /// Maximum bisection depth of the adaptive Gauss–Kronrod rule per panel.
  unsigned max_depth = 18;
};

/// ∫ f(v)·P(X > v + c) dv computed numerically to absolute accuracy `tol`.
/// Unbounded supports are truncated where the neglected mass is below
/// tol/10. PointMassZero is evaluated as a one-atom sum. Throws NumericError
/// carrying the achieved accuracy when the budget is exhausted first.
double pair_probability_quadrature(const PerturbationSpec& spec, double c,
                                   double tol, QuadratureOptions opts = {});

/// Finite-support noise: P(X = atoms[k]) = masses[k].
struct DiscreteNoise {
  std::vector<double> atoms;
  std::vector<double> masses;

  void validate() const;
};

/// Σ_v P(v)·P(X >= v + c), exact.
double pair_probability_discrete(const DiscreteNoise& noise, double c);

/// CDF of d_j − d_i for i.i.d. Gumbel(μ, β): the logistic 1/(1 + e^{-x/β}).
double gumbel_difference_cdf(double x, double beta);

}  // namespace experts
