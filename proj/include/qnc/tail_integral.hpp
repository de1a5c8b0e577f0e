#pragma once

#include <functional>
#include <span>

namespace qnc::tail {

// phi(w) = modulus(w) * exp(j * phase(w)) for a nonnegative random variable
// X, plus the decay exponent p(w) = -d log(modulus) / d log(w), which is
// nondecreasing in w for every law handled here. The exponent bounds the
// truncated tail: for w >= W, modulus(w) <= modulus(W) (W / w)^p(W).
struct PolarPoint {
  double modulus = 1.0;
  double phase = 0.0;
  double decay_exponent = 0.0;
};

struct CharacteristicFunction {
  std::function<PolarPoint(double)> at;
  double mean = 0.0;  // phase'(0) = E[X]
};

// X = sum_e lambda_e chi2_1 (lambda_e >= 0). Zero weights are ignored.
CharacteristicFunction weighted_chisq(std::span<const double> lambdas);

// X = chi2_m / m: the squared norm of G x for an m-row i.i.d. Gaussian G
// with variance 1/m and unit x.
CharacteristicFunction scaled_chisq(int dof);

struct InversionOptions {
  double tolerance = 2e-10;  // absolute, per CDF evaluation
  int max_panels = 400000;
};

// P(X <= a) by Gil-Pelaez inversion,
//   F(a) = 1/2 - (1/pi) int_0^inf modulus(w) sin(phase(w) - a w) / w dw,
// integrated over half-period panels of width pi/a. The panel partial sums
// stop either on the decay bound (rigorous truncation) or when Wynn's
// epsilon extrapolation of the alternating sums has settled. Requires a
// continuous law (mean > 0); F(a) = 0 for a <= 0.
// Throws NumericalError when neither criterion is met within max_panels.
double cdf(const CharacteristicFunction& phi, double a, const InversionOptions& options = {});

// P(|X - 1| >= epsilon) = 1 - F(1 + epsilon) + F(1 - epsilon), clamped to [0, 1].
double deviation_probability(const CharacteristicFunction& phi, double epsilon,
                             const InversionOptions& options = {});

// Last even-column entry of Wynn's epsilon table for the sequence `s`.
double wynn_epsilon(std::span<const double> s);

}  // namespace qnc::tail
