#include "qnc/tail_integral.hpp"

#include "qnc/common.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnc::tail {

namespace {

constexpr int kMinPanelsBeforeExtrapolation = 8;
constexpr std::size_t kWynnWindow = 24;
constexpr int kStableExtrapolations = 3;

}  // namespace

CharacteristicFunction weighted_chisq(std::span<const double> lambdas) {
  std::vector<double> weights;
  double mean = 0.0;
  for (double l : lambdas) {
    if (l < 0.0 || !std::isfinite(l)) throw std::invalid_argument("weights must be finite and >= 0");
    if (l > 0.0) {
      weights.push_back(l);
      mean += l;
    }
  }
  CharacteristicFunction phi;
  phi.mean = mean;
  phi.at = [weights = std::move(weights)](double w) {
    double log_mod = 0.0, phase = 0.0, decay = 0.0;
    for (double l : weights) {
      const double x = 2.0 * w * l;
      const double x2 = x * x;
      log_mod -= 0.25 * std::log1p(x2);
      phase += 0.5 * std::atan(x);
      decay += 0.5 * x2 / (1.0 + x2);
    }
    return PolarPoint{std::exp(log_mod), phase, decay};
  };
  return phi;
}

CharacteristicFunction scaled_chisq(int dof) {
  if (dof < 1) throw std::invalid_argument("degrees of freedom must be positive");
  const double m = dof;
  CharacteristicFunction phi;
  phi.mean = 1.0;
  // (1 - 2jw/m)^(-m/2)
  phi.at = [m](double w) {
    const double x = 2.0 * w / m;
    const double x2 = x * x;
    return PolarPoint{std::exp(-0.25 * m * std::log1p(x2)), 0.5 * m * std::atan(x),
                      0.5 * m * x2 / (1.0 + x2)};
  };
  return phi;
}

double wynn_epsilon(std::span<const double> s) {
  if (s.empty()) throw std::invalid_argument("empty sequence");
  std::vector<double> prev(s.size() + 1, 0.0);
  std::vector<double> cur(s.begin(), s.end());
  double best = s.back();
  for (int k = 0; cur.size() > 1; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
      const double diff = cur[j + 1] - cur[j];
      next[j] = prev[j + 1] + 1.0 / diff;
      if (!std::isfinite(next[j])) return best;
    }
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 1) best = cur.back();
  }
  return best;
}

double cdf(const CharacteristicFunction& phi, double a, const InversionOptions& options) {
  if (a <= 0.0) return 0.0;
  if (!(phi.mean > 0.0)) throw std::invalid_argument("cdf needs a nondegenerate law");

  auto integrand = [&](double w) {
    if (w < 1e-12) return phi.mean - a;
    const PolarPoint p = phi.at(w);
    return p.modulus * std::sin(p.phase - a * w) / w;
  };

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double pi = std::numbers::pi;
  const double panel = pi / a;
  // Integral accuracy needed for the requested CDF accuracy.
  const double target = options.tolerance * pi;

  std::vector<double> partial;
  std::vector<double> extrapolated;
  double sum = 0.0;
  double quad_error = 0.0;
  int stable = 0;
  for (int k = 0; k < options.max_panels; ++k) {
    const double lo = k * panel;
    const double hi = lo + panel;
    double err = 0.0;
    sum += Quadrature::integrate(integrand, lo, hi, 12, 1e-13, &err);
    quad_error += err;
    partial.push_back(sum);

    const PolarPoint end = phi.at(hi);
    if (end.decay_exponent > 0.0 && end.modulus / end.decay_exponent < 0.5 * target) {
      return 0.5 - sum / pi;
    }

    if (k + 1 >= kMinPanelsBeforeExtrapolation) {
      const std::size_t window = std::min(partial.size(), kWynnWindow);
      const double est = wynn_epsilon(std::span(partial).last(window));
      if (!extrapolated.empty() && std::abs(est - extrapolated.back()) < 0.1 * target) {
        ++stable;
      } else {
        stable = 0;
      }
      extrapolated.push_back(est);
      if (stable >= kStableExtrapolations) {
        if (quad_error > target) break;
        return 0.5 - est / pi;
      }
    }
  }
  throw NumericalError("characteristic-function inversion did not converge at a = " +
                       std::to_string(a));
}

double deviation_probability(const CharacteristicFunction& phi, double epsilon,
                             const InversionOptions& options) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (phi.mean == 0.0) return epsilon <= 1.0 ? 1.0 : 0.0;
  const double upper = cdf(phi, 1.0 + epsilon, options);
  const double lower = cdf(phi, 1.0 - epsilon, options);
  return std::clamp(1.0 - upper + lower, 0.0, 1.0);
}

}  // namespace qnc::tail
