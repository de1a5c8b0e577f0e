#pragma once

#include "qnc/common.hpp"
#include "qnc/network_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace qnc {

// Deviation threshold for |‖Φx‖² - 1| >= epsilon.
struct TailQuery {
  double epsilon = 0.0;

  explicit TailQuery(double eps);
};

// Eigenvalues of Γ(x), descending and nonnegative. ‖Ψ_tot x‖² is
// distributed as sum_e lambdas[e] chi2_1 under Gaussian alpha coefficients.
struct TailSpectrum {
  std::vector<double> lambdas;

  double sum() const;
};

// Γ(x) = σ_α² D_x ΩᵀΩ D_x, D_x = diag(x[tail(e)]). `x` must have unit norm
// within 1e-12.
Matrix build_gamma(const Matrix& omega, const Vector& x, std::span<const NodeId> edge_tails,
                   double sigma_alpha_sq);
Matrix build_gamma(const Matrix& omega, const Vector& x, const NetworkGraph& g,
                   double sigma_alpha_sq);

// Symmetric eigenvalues, descending. Values in (-1e-10, 0] clamp to zero;
// anything more negative throws NumericalError. Non-symmetric input throws
// std::invalid_argument.
TailSpectrum eigen_spectrum(const Matrix& gamma);

enum class SpectrumRoute {
  kAuto,             // smaller of the two Gram matrices over active edges
  kEdgeGram,         // Γ itself, |E| x |E|
  kMeasurementGram,  // σ² (ΩD)(ΩD)ᵀ, m x m, zero padded to |E|
};

// Spectrum of Γ(x) without necessarily forming Γ. Both Gram routes share
// the nonzero eigenvalues.
TailSpectrum tail_spectrum(const Matrix& omega, const Vector& x,
                           std::span<const NodeId> edge_tails, double sigma_alpha_sq,
                           SpectrumRoute route = SpectrumRoute::kAuto);

// Spectrum of Γ(x) for many x against one (Ω, σ²). Keeps σ²ΩᵀΩ when
// m >= |E|, otherwise σΩ with σ = sqrt(σ²), and restricts to edges whose tail carries
// nonzero x.
class TailEvaluator {
 public:
  TailEvaluator(const Matrix& omega, std::span<const NodeId> edge_tails, int node_count,
                double sigma_alpha_sq);

  TailSpectrum spectrum(const Vector& x) const;
  double tail(const Vector& x, TailQuery q) const;

  int node_count() const { return node_count_; }

 private:
  std::vector<NodeId> tails_;
  int node_count_;
  bool use_edge_gram_;
  Matrix factor_;  // σ²ΩᵀΩ or σΩ
};

// P(|sum λ_e χ²_e - 1| >= ε) by characteristic-function inversion. An all-zero
// spectrum gives 1 for ε <= 1 and 0 otherwise.
double tail_probability_weighted_chisq(const TailSpectrum& spectrum, TailQuery q);

// Same probability for an m x n i.i.d. Gaussian matrix with variance 1/m,
// i.e. for chi2_m / m; independent of the (unit) direction.
double tail_probability_gaussian(int m, TailQuery q);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Direct sampling of sum λ_e g_e² with standard normal g_e.
MonteCarloEstimate tail_probability_monte_carlo(const TailSpectrum& spectrum, TailQuery q,
                                                long sample_count, std::uint64_t seed);

struct SearchBudget {
  int random_starts = 512;
  int refine_starts = 4;     // best starts that get coordinate ascent
  int max_sweeps = 25;       // coordinate ascent sweeps per refined start
  double initial_step = 0.5;
  double min_step = 1.0 / 64.0;
  int workers = 1;           // 0 = hardware concurrency
  std::uint64_t seed = 0;
};

struct WorstCaseResult {
  double p_tail = 0.0;  // best value found: a lower bound on the true maximum
  Vector x;
  long evaluations = 0;
};

// Maximizes the tail probability over unit x: all canonical directions plus
// `random_starts` random directions, then projected coordinate ascent with a
// halving step from the best `refine_starts` of them. Deterministic for a
// given budget, independent of the worker count.
WorstCaseResult worst_case_tail(const Matrix& omega, std::span<const NodeId> edge_tails,
                                int node_count, double sigma_alpha_sq, TailQuery q,
                                const SearchBudget& budget);
WorstCaseResult worst_case_tail(const Matrix& omega, const NetworkGraph& g,
                                double sigma_alpha_sq, TailQuery q, const SearchBudget& budget);

struct RipBound {
  int n = 0;
  int k = 0;
  double delta_k = 0.0;
  double p_tail = 0.0;
  double p_rip = 0.0;
  bool vacuous = false;  // union bound exceeded one; p_rip floored at 0
};

// 1 - C(n,k) (42/δ_k)^k p_tail, evaluated in log space and floored at 0.
// p_tail is expected at ε = δ_k / √2.
double rip_lower_bound(double p_tail, int n, int k, double delta_k);
RipBound rip_bound(double p_tail, int n, int k, double delta_k);

// ε at which the tail probability enters the RIP bound for δ_k.
double rip_epsilon(double delta_k);

struct TailCurveRecord {
  int deployment = 0;
  int m = 0;
  double epsilon = 0.0;
  double p_tail_qnc = 0.0;
  double p_tail_gauss = 0.0;
};

// Comma separated with a header row.
void write_tail_curve(std::ostream& os, std::span<const TailCurveRecord> records);

}  // namespace qnc
