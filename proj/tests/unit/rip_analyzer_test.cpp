#include "qnc/rip_analyzer.hpp"

#include "qnc/qnc_engine.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace qnc;

namespace {

Vector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = normal(rng);
  return x / x.norm();
}

Matrix random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

NetworkGraph random_graph(int n, int edges, std::uint64_t seed) {
  DeploymentConfig c;
  c.node_count = n;
  c.edge_count = edges;
  c.seed = seed;
  return generate_deployment(c);
}

}  // namespace

TEST(TailQuery, RequiresPositiveEpsilon) {
  EXPECT_THROW(TailQuery(0.0), std::invalid_argument);
  EXPECT_THROW(TailQuery(-1.0), std::invalid_argument);
  EXPECT_NO_THROW(TailQuery(1e-6));
}

TEST(Gamma, IdentityOmegaCanonicalDirection) {
  const std::vector<NodeId> tails{0, 1, 0, 2};
  const Matrix gamma = build_gamma(Matrix::Identity(4, 4), Vector::Unit(3, 0), tails, 0.5);
  Vector diag(4);
  diag << 0.5, 0, 0.5, 0;
  EXPECT_EQ(gamma, Matrix(diag.asDiagonal()));
}

TEST(Gamma, ZeroWhenNoTailCarriesMass) {
  std::mt19937_64 rng(1);
  const std::vector<NodeId> tails{0, 0, 1};
  const Matrix gamma = build_gamma(random_matrix(4, 3, rng), Vector::Unit(3, 2), tails, 2.0);
  EXPECT_TRUE(gamma.isZero(0.0));
}

TEST(Gamma, HandExample) {
  Matrix omega(2, 3);
  omega << 1, 2, 0,  //
      0, 1, 3;
  const std::vector<NodeId> tails{0, 1, 1};
  Vector x(2);
  x << 0.6, 0.8;
  // ΩᵀΩ = [[1,2,0],[2,5,3],[0,3,9]]; D = diag(0.6, 0.8, 0.8); σ² = 2.
  Matrix expected(3, 3);
  expected << 2 * 0.36, 2 * 2 * 0.48, 0,  //
      2 * 2 * 0.48, 2 * 5 * 0.64, 2 * 3 * 0.64,  //
      0, 2 * 3 * 0.64, 2 * 9 * 0.64;
  EXPECT_TRUE(build_gamma(omega, x, tails, 2.0).isApprox(expected, 1e-15));
}

TEST(Gamma, RejectsNonUnitDirection) {
  const std::vector<NodeId> tails{0};
  EXPECT_THROW(build_gamma(Matrix::Identity(1, 1), Vector::Constant(1, 1.0 + 1e-9), tails, 1.0),
               std::invalid_argument);
}

TEST(Eigen, DiagonalSortedAndRankOne) {
  Vector d(4);
  d << 0.2, 3.0, 0.0, 1.0;
  const TailSpectrum s = eigen_spectrum(d.asDiagonal());
  EXPECT_EQ(s.lambdas, (std::vector<double>{3.0, 1.0, 0.2, 0.0}));

  Vector v(3);
  v << 1, -2, 2;
  const TailSpectrum r = eigen_spectrum(v * v.transpose());
  EXPECT_NEAR(r.lambdas[0], 9.0, 1e-12);
  EXPECT_NEAR(r.lambdas[1], 0.0, 1e-12);
  EXPECT_NEAR(r.lambdas[2], 0.0, 1e-12);
}

TEST(Eigen, TraceIdentity) {
  std::mt19937_64 rng(2);
  const Matrix a = random_matrix(6, 6, rng);
  const Matrix psd = a * a.transpose();
  EXPECT_NEAR(eigen_spectrum(psd).sum(), psd.trace(), 1e-10);
}

TEST(Eigen, Errors) {
  Matrix asym(2, 2);
  asym << 1, 2, 0, 1;
  EXPECT_THROW(eigen_spectrum(asym), std::invalid_argument);
  Matrix indefinite(2, 2);
  indefinite << 0, 1, 1, 0;
  EXPECT_THROW(eigen_spectrum(indefinite), NumericalError);
  Matrix tiny = Matrix::Zero(2, 2);
  tiny(0, 0) = -1e-12;
  EXPECT_EQ(eigen_spectrum(tiny).lambdas, (std::vector<double>{0.0, 0.0}));
}

TEST(Spectrum, RoutesAgreeAndPadToEdgeCount) {
  std::mt19937_64 rng(3);
  const NetworkGraph g = random_graph(10, 30, 3);
  for (int rows : {5, 30, 60}) {
    const Matrix omega = random_matrix(rows, 30, rng);
    const Vector x = random_unit(10, rng);
    const auto edge = tail_spectrum(omega, x, g.edge_tails(), 0.3, SpectrumRoute::kEdgeGram);
    const auto meas =
        tail_spectrum(omega, x, g.edge_tails(), 0.3, SpectrumRoute::kMeasurementGram);
    const auto autos = tail_spectrum(omega, x, g.edge_tails(), 0.3);
    const TailEvaluator evaluator(omega, g.edge_tails(), 10, 0.3);
    const auto cached = evaluator.spectrum(x);
    ASSERT_EQ(edge.lambdas.size(), 30u);
    ASSERT_EQ(meas.lambdas.size(), 30u);
    ASSERT_EQ(cached.lambdas.size(), 30u);
    for (std::size_t i = 0; i < 30; ++i) {
      EXPECT_NEAR(edge.lambdas[i], meas.lambdas[i], 1e-10);
      EXPECT_NEAR(edge.lambdas[i], autos.lambdas[i], 1e-10);
      EXPECT_NEAR(edge.lambdas[i], cached.lambdas[i], 1e-10);
    }
    // Trace identity: sum λ = σ² ‖Ω D_x‖_F².
    Vector d(30);
    for (int e = 0; e < 30; ++e) d(e) = x(g.edge_tails()[e]);
    EXPECT_NEAR(edge.sum(), 0.3 * (omega * d.asDiagonal()).squaredNorm(), 1e-10);
  }
}

TEST(TailProbability, ClosedFormAnchors) {
  EXPECT_NEAR(tail_probability_weighted_chisq({{1.0}}, TailQuery(0.5)), 0.74117, 1e-5);
  EXPECT_NEAR(tail_probability_weighted_chisq({{0.5, 0.5}}, TailQuery(0.5)), 0.61660, 1e-5);
  EXPECT_NEAR(tail_probability_weighted_chisq({{1.0, 0.0, 0.0}}, TailQuery(0.5)),
              oracle::gaussian_tail(1, 0.5), 1e-8);
  EXPECT_NEAR(tail_probability_gaussian(2, TailQuery(0.5)), 0.61660, 1e-5);
  EXPECT_NEAR(tail_probability_gaussian(1, TailQuery(0.5)), 0.74117, 1e-5);
}

TEST(TailProbability, GaussianHundredAgainstIncompleteGamma) {
  const double eps = 0.41421 / std::sqrt(2.0);
  EXPECT_NEAR(tail_probability_gaussian(100, TailQuery(eps)), oracle::gaussian_tail(100, eps),
              1e-6);
}

TEST(TailProbability, GaussianEqualsEqualWeights) {
  for (int m : {1, 2, 5, 10, 50, 100}) {
    for (double eps : {0.1, 0.29289, 0.5, 1.0}) {
      const std::vector<double> l(m, 1.0 / m);
      EXPECT_NEAR(tail_probability_gaussian(m, TailQuery(eps)),
                  tail_probability_weighted_chisq({l}, TailQuery(eps)), 1e-8)
          << m << " " << eps;
    }
  }
}

TEST(TailProbability, DegenerateSpectrum) {
  EXPECT_EQ(tail_probability_weighted_chisq({{0.0, 0.0}}, TailQuery(0.5)), 1.0);
  EXPECT_EQ(tail_probability_weighted_chisq({{0.0}}, TailQuery(1.0)), 1.0);
  EXPECT_EQ(tail_probability_weighted_chisq({{0.0}}, TailQuery(1.5)), 0.0);
  EXPECT_THROW(tail_probability_weighted_chisq({}, TailQuery(0.5)), std::invalid_argument);
  EXPECT_THROW(tail_probability_gaussian(0, TailQuery(0.5)), std::invalid_argument);
}

TEST(TailProbability, LargeEpsilonIsSmall) {
  const TailSpectrum s{{0.4, 0.3, 0.2, 0.1}};
  const double p = tail_probability_weighted_chisq(s, TailQuery(10.0));
  EXPECT_GE(p, 0.0);
  EXPECT_LT(p, 1e-3);
}

TEST(MonteCarlo, ClosedFormAndZeroSpectrum) {
  const MonteCarloEstimate mc = tail_probability_monte_carlo({{1.0}}, TailQuery(0.5), 1000000, 4);
  EXPECT_NEAR(mc.estimate, 0.74117, 3 * mc.std_error);
  EXPECT_EQ(tail_probability_monte_carlo({{0.0, 0.0}}, TailQuery(0.5), 10000, 1).estimate, 1.0);
  EXPECT_THROW(tail_probability_monte_carlo({{1.0}}, TailQuery(0.5), 9999, 1),
               std::invalid_argument);
}

TEST(WorstCase, AtLeastEveryCanonicalDirection) {
  const NetworkGraph g = random_graph(8, 20, 5);
  SearchBudget budget;
  budget.random_starts = 16;
  budget.refine_starts = 2;
  budget.max_sweeps = 4;
  const TailQuery q(0.3);
  const Matrix omega = Matrix::Identity(20, 20);
  const WorstCaseResult r = worst_case_tail(omega, g, 0.4, q, budget);
  for (NodeId v = 0; v < 8; ++v) {
    const double pv = tail_probability_weighted_chisq(
        tail_spectrum(omega, Vector::Unit(8, v), g.edge_tails(), 0.4), q);
    EXPECT_GE(r.p_tail, pv);
  }
  EXPECT_NEAR(r.x.norm(), 1.0, 1e-12);
  EXPECT_NEAR(r.p_tail,
              tail_probability_weighted_chisq(tail_spectrum(omega, r.x, g.edge_tails(), 0.4), q),
              1e-12);
}

TEST(WorstCase, SingleNodeIsExact) {
  const std::vector<NodeId> tails{0, 0};
  Matrix omega(2, 2);
  omega << 1, 0.5, 0, 1;
  SearchBudget budget;
  budget.random_starts = 4;
  const WorstCaseResult r = worst_case_tail(omega, tails, 1, 0.5, TailQuery(0.4), budget);
  EXPECT_DOUBLE_EQ(r.p_tail,
                   tail_probability_weighted_chisq(
                       tail_spectrum(omega, Vector::Ones(1), tails, 0.5), TailQuery(0.4)));
}

TEST(WorstCase, DeterministicAcrossWorkerCounts) {
  const NetworkGraph g = random_graph(10, 30, 6);
  const CoefficientSchedule s = draw_coefficients(g, 5, 6);
  const Matrix omega = build_omega(s, g, 5);
  SearchBudget budget;
  budget.random_starts = 32;
  budget.refine_starts = 2;
  budget.max_sweeps = 3;
  budget.seed = 77;
  const WorstCaseResult a = worst_case_tail(omega, g, s.sigma_alpha_sq, TailQuery(0.3), budget);
  budget.workers = 3;
  const WorstCaseResult b = worst_case_tail(omega, g, s.sigma_alpha_sq, TailQuery(0.3), budget);
  EXPECT_EQ(a.p_tail, b.p_tail);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(RipBound, ZeroTailGivesOne) {
  EXPECT_EQ(rip_lower_bound(0.0, 100, 5, 0.41421), 1.0);
}

TEST(RipBound, HandArithmetic) {
  const double expected = 1.0 - 4950.0 * std::pow(42.0 / 0.41421, 2) * 1e-12;
  EXPECT_NEAR(rip_lower_bound(1e-12, 100, 2, 0.41421), expected, 1e-14);
  EXPECT_NEAR(1.0 - rip_lower_bound(1e-12, 100, 2, 0.41421), 5.09e-5, 0.005e-5);
}

TEST(RipBound, VacuousFloorsAtZero) {
  const RipBound b = rip_bound(0.01, 100, 3, 0.2);
  EXPECT_EQ(b.p_rip, 0.0);
  EXPECT_TRUE(b.vacuous);
  EXPECT_THROW(rip_bound(0.1, 10, 11, 0.2), std::invalid_argument);
  EXPECT_THROW(rip_bound(0.1, 10, 2, 1.0), std::invalid_argument);
  EXPECT_THROW(rip_bound(1.5, 10, 2, 0.5), std::invalid_argument);
}

TEST(TailCurve, HeaderAndRows) {
  std::ostringstream os;
  const std::vector<TailCurveRecord> rows{{3, 40, 0.25, 0.5, 0.125}};
  write_tail_curve(os, rows);
  EXPECT_EQ(os.str(), "deployment,m,epsilon,p_tail_qnc,p_tail_gauss\n3,40,0.25,0.5,0.125\n");
}
