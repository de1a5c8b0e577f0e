#include "qnc/tail_integral.hpp"

#include "qnc/common.hpp"
#include "oracles.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace qnc;

TEST(Wynn, AcceleratesAlternatingSeries) {
  // log 2 = 1 - 1/2 + 1/3 - ...
  std::vector<double> partial;
  double s = 0.0;
  for (int k = 1; k <= 14; ++k) {
    s += (k % 2 ? 1.0 : -1.0) / k;
    partial.push_back(s);
  }
  EXPECT_NEAR(tail::wynn_epsilon(partial), std::log(2.0), 1e-9);
  EXPECT_GT(std::abs(partial.back() - std::log(2.0)), 1e-2);
}

TEST(Cdf, MatchesChiSquare) {
  for (int dof : {1, 2, 3, 7, 40}) {
    boost::math::chi_squared dist(dof);
    const auto phi = tail::scaled_chisq(dof);
    for (double a : {0.05, 0.5, 1.0, 1.7, 4.0}) {
      EXPECT_NEAR(tail::cdf(phi, a), boost::math::cdf(dist, dof * a), 1e-9)
          << "dof " << dof << " a " << a;
    }
  }
}

TEST(Cdf, NonPositiveArgumentIsZero) {
  const auto phi = tail::scaled_chisq(3);
  EXPECT_EQ(tail::cdf(phi, 0.0), 0.0);
  EXPECT_EQ(tail::cdf(phi, -1.0), 0.0);
}

TEST(Cdf, UnequalWeightsAgainstTwoTermConvolution) {
  // X = a g1^2 + b g2^2: F(x) = int_0^{x/a} f1(u) F1((x - a u) / b) du, done
  // with a fine midpoint rule on the sqrt-substituted variable.
  const double a = 0.7, b = 0.3;
  const std::vector<double> w{a, b};
  const auto phi = tail::weighted_chisq(w);
  boost::math::chi_squared one(1);
  for (double x : {0.3, 1.0, 2.2}) {
    // u = v^2 so f1(u) du = 2 v f1(v^2) dv = sqrt(2/pi) exp(-v^2/2) dv.
    const double top = std::sqrt(x / a);
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = (i + 0.5) * top / n;
      acc += std::sqrt(2.0 / M_PI) * std::exp(-v * v / 2) *
             boost::math::cdf(one, std::max(0.0, (x - a * v * v) / b));
    }
    EXPECT_NEAR(tail::cdf(phi, x), acc * top / n, 1e-7);
  }
}

TEST(WeightedChisq, RejectsBadWeights) {
  EXPECT_THROW(tail::weighted_chisq(std::vector<double>{-0.1}), std::invalid_argument);
  EXPECT_THROW(tail::weighted_chisq(std::vector<double>{NAN}), std::invalid_argument);
}

TEST(Deviation, ClosedForms) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{0.5, 0.5};
  EXPECT_NEAR(tail::deviation_probability(tail::weighted_chisq(one), 0.5),
              oracle::gaussian_tail(1, 0.5), 1e-9);
  EXPECT_NEAR(tail::deviation_probability(tail::weighted_chisq(two), 0.5),
              1.0 - (std::exp(-0.5) - std::exp(-1.5)), 1e-9);
}

TEST(Deviation, WideThresholdOnlyUpperTail) {
  const auto phi = tail::scaled_chisq(10);
  boost::math::chi_squared dist(10);
  EXPECT_NEAR(tail::deviation_probability(phi, 1.5),
              boost::math::cdf(boost::math::complement(dist, 25.0)), 1e-10);
}
