#include "experts/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "experts/error.hpp"

namespace experts {

void PerturbationSpec::validate() const {
  if (!std::isfinite(location)) {
    throw ConfigError("perturbation location must be finite");
  }
  if (stochastic() && !(std::isfinite(scale) && scale > 0.0)) {
    throw ConfigError(fmt::format("{} noise needs a finite positive scale, got {}",
                                  to_string(family), scale));
  }
}

std::string_view to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::Exponential: return "exponential";
    case NoiseFamily::Gumbel: return "gumbel";
    case NoiseFamily::PointMassZero: return "zero";
  }
  return "?";
}

std::string_view to_string(NoiseSign s) {
  return s == NoiseSign::Subtract ? "subtract" : "add";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "uniform") return NoiseFamily::Uniform;
  if (name == "exponential") return NoiseFamily::Exponential;
  if (name == "gumbel") return NoiseFamily::Gumbel;
  if (name == "zero" || name == "point-mass-zero") return NoiseFamily::PointMassZero;
  throw ConfigError(fmt::format("unknown noise family '{}'", name));
}

NoiseSign parse_noise_sign(std::string_view name) {
  if (name == "subtract") return NoiseSign::Subtract;
  if (name == "add") return NoiseSign::Add;
  throw ConfigError(fmt::format("unknown noise sign '{}'", name));
}

double sample(const PerturbationSpec& spec, RngStream& rng) {
  switch (spec.family) {
    case NoiseFamily::PointMassZero:
      return 0.0;
    case NoiseFamily::Uniform:
      return spec.scale * rng.uniform01();
    case NoiseFamily::Exponential:
      return -std::log(rng.uniform_open01()) / spec.scale;
    case NoiseFamily::Gumbel:
      return spec.location - spec.scale * std::log(-std::log(rng.uniform_open01()));
  }
  return 0.0;
}

double density(const PerturbationSpec& spec, double x) {
  switch (spec.family) {
    case NoiseFamily::Uniform:
      return (x >= 0.0 && x <= spec.scale) ? 1.0 / spec.scale : 0.0;
    case NoiseFamily::Exponential:
      return x >= 0.0 ? spec.scale * std::exp(-spec.scale * x) : 0.0;
    case NoiseFamily::Gumbel: {
      const double z = (x - spec.location) / spec.scale;
      return std::exp(-(z + std::exp(-z))) / spec.scale;
    }
    case NoiseFamily::PointMassZero:
      break;
  }
  throw ConfigError("point mass has no density");
}

double survival(const PerturbationSpec& spec, double x) {
  switch (spec.family) {
    case NoiseFamily::Uniform:
      if (x <= 0.0) return 1.0;
      if (x >= spec.scale) return 0.0;
      return (spec.scale - x) / spec.scale;
    case NoiseFamily::Exponential:
      return x <= 0.0 ? 1.0 : std::exp(-spec.scale * x);
    case NoiseFamily::Gumbel: {
      const double z = (x - spec.location) / spec.scale;
      return -std::expm1(-std::exp(-z));
    }
    case NoiseFamily::PointMassZero:
      return x < 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double pair_probability_closed_form(const PerturbationSpec& spec, double c) {
  spec.validate();
  if (!(c >= 0.0)) throw DomainError(fmt::format("loss gap must be >= 0, got {}", c));
  switch (spec.family) {
    case NoiseFamily::Exponential:
      return 0.5 * std::exp(-spec.scale * c);
    case NoiseFamily::Uniform: {
      const double eps = spec.scale;
      if (c >= eps) return 0.0;
      const double d = eps - c;
      return d * d / (2.0 * eps * eps);
    }
    case NoiseFamily::Gumbel: {
      // Written as rate times gap so it matches the Hedge pair formula with
      // beta = 1/scale bit for bit.
      const double e = std::exp(-(1.0 / spec.scale) * c);
      return e / (1.0 + e);
    }
    case NoiseFamily::PointMassZero:
      break;
  }
  throw ConfigError("pair_probability_closed_form: point mass has no closed form");
}

void DiscreteNoise::validate() const {
  if (atoms.empty() || atoms.size() != masses.size()) {
    throw ConfigError("discrete noise needs matching, nonempty atoms and masses");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!std::isfinite(atoms[k]) || !(masses[k] >= 0.0)) {
      throw ConfigError("discrete noise: invalid atom or mass");
    }
    total += masses[k];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError(fmt::format("discrete noise masses sum to {}", total));
  }
}

double pair_probability_discrete(const DiscreteNoise& noise, double c) {
  noise.validate();
  double p = 0.0;
  for (std::size_t a = 0; a < noise.atoms.size(); ++a) {
    double tail = 0.0;
    for (std::size_t b = 0; b < noise.atoms.size(); ++b) {
      if (noise.atoms[b] >= noise.atoms[a] + c) tail += noise.masses[b];
    }
    p += noise.masses[a] * tail;
  }
  return p;
}

double pair_probability_quadrature(const PerturbationSpec& spec, double c,
                                   double tol, QuadratureOptions opts) {
  spec.validate();
  if (!(c >= 0.0)) throw DomainError(fmt::format("loss gap must be >= 0, got {}", c));
  if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");

  if (spec.family == NoiseFamily::PointMassZero) {
    return pair_probability_discrete(DiscreteNoise{{0.0}, {1.0}}, c);
  }

  // Panel breakpoints cover the support, truncated where the neglected
  // density mass is at most tol/10 in total.
  std::vector<double> cuts;
  double truncated = 0.0;
  switch (spec.family) {
    case NoiseFamily::Uniform:
      cuts = {0.0, spec.scale};
      if (c > 0.0 && c < spec.scale) cuts.push_back(spec.scale - c);
      break;
    case NoiseFamily::Exponential: {
      const double tail = tol / 10.0;
      cuts = {0.0, std::log(1.0 / tail) / spec.scale};
      truncated = tail;
      break;
    }
    case NoiseFamily::Gumbel: {
      const double tail = tol / 20.0;
      const double lo = spec.location - spec.scale * std::log(-std::log(tail));
      const double hi = spec.location - spec.scale * std::log(-std::log1p(-tail));
      cuts = {lo, spec.location, hi};
      truncated = 2.0 * tail;
      break;
    }
    case NoiseFamily::PointMassZero:
      break;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&](double v) { return density(spec, v) * survival(spec, v + c); };

  using boost::math::quadrature::gauss_kronrod;
  const std::size_t panels = cuts.size() - 1;
  // The integrand is bounded by the density, so its L1 norm on any panel is
  // at most 1 and a relative target of `budget` is also an absolute one.
  const double budget = 0.5 * tol / static_cast<double>(panels);
  double total = 0.0;
  double err_total = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    double err = 0.0;
    total += gauss_kronrod<double, 31>::integrate(integrand, cuts[k], cuts[k + 1],
                                                  opts.max_depth, budget, &err);
    err_total += err;
  }
  const double achieved = err_total + truncated;
  if (achieved > tol) {
    throw NumericError(
        fmt::format("quadrature reached accuracy {} but {} was requested",
                    achieved, tol),
        achieved);
  }
  return total;
}

double gumbel_difference_cdf(double x, double beta) {
  if (!(beta > 0.0)) throw DomainError("gumbel_difference_cdf: beta must be positive");
  return 1.0 / (1.0 + std::exp(-x / beta));
}

}  // namespace experts
