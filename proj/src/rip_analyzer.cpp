#include "qnc/rip_analyzer.hpp"

#include "qnc/tail_integral.hpp"
#include "qnc/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace qnc {

namespace {

constexpr double kUnitNormTolerance = 1e-12;
constexpr double kNegativeEigenTolerance = 1e-10;

void check_inputs(const Matrix& omega, const Vector& x, std::span<const NodeId> tails) {
  if (static_cast<Eigen::Index>(tails.size()) != omega.cols()) {
    throw std::invalid_argument("edge tail count does not match omega columns");
  }
  if (std::abs(x.norm() - 1.0) > kUnitNormTolerance) {
    throw std::invalid_argument("x must have unit norm");
  }
  for (NodeId v : tails) {
    if (v < 0 || v >= x.size()) throw std::invalid_argument("edge tail outside message range");
  }
}

TailSpectrum spectrum_of_gram(const Matrix& gram, std::size_t length) {
  TailSpectrum s = eigen_spectrum(gram);
  s.lambdas.resize(length, 0.0);
  return s;
}

}  // namespace

TailQuery::TailQuery(double eps) : epsilon(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("epsilon must be positive");
}

double TailSpectrum::sum() const { return std::accumulate(lambdas.begin(), lambdas.end(), 0.0); }

Matrix build_gamma(const Matrix& omega, const Vector& x, std::span<const NodeId> edge_tails,
                   double sigma_alpha_sq) {
  check_inputs(omega, x, edge_tails);
  Vector d(omega.cols());
  for (Eigen::Index e = 0; e < d.size(); ++e) d(e) = x(edge_tails[e]);
  Matrix gram = omega.transpose() * omega;
  Matrix gamma = sigma_alpha_sq * d.asDiagonal() * gram * d.asDiagonal();
  // Exact symmetry; the product above is symmetric only up to rounding.
  return 0.5 * (gamma + gamma.transpose());
}

Matrix build_gamma(const Matrix& omega, const Vector& x, const NetworkGraph& g,
                   double sigma_alpha_sq) {
  return build_gamma(omega, x, g.edge_tails(), sigma_alpha_sq);
}

TailSpectrum eigen_spectrum(const Matrix& gamma) {
  if (gamma.rows() != gamma.cols()) throw std::invalid_argument("gamma must be square");
  TailSpectrum s;
  if (gamma.rows() == 0) return s;
  const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("gamma is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gamma, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  const Vector& ev = solver.eigenvalues();
  s.lambdas.resize(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double l = ev(ev.size() - 1 - i);
    if (l < -kNegativeEigenTolerance) {
      throw NumericalError("spurious negative eigenvalue " + text_io::format_double(l));
    }
    s.lambdas[i] = std::max(l, 0.0);
  }
  return s;
}

TailSpectrum tail_spectrum(const Matrix& omega, const Vector& x,
                           std::span<const NodeId> edge_tails, double sigma_alpha_sq,
                           SpectrumRoute route) {
  if (route == SpectrumRoute::kEdgeGram) {
    return eigen_spectrum(build_gamma(omega, x, edge_tails, sigma_alpha_sq));
  }
  check_inputs(omega, x, edge_tails);
  const std::size_t edges = edge_tails.size();
  std::vector<Eigen::Index> active;
  for (std::size_t e = 0; e < edges; ++e) {
    if (x(edge_tails[e]) != 0.0) active.push_back(static_cast<Eigen::Index>(e));
  }
  // Scaled columns of Ω D_x restricted to active edges.
  const double scale = std::sqrt(sigma_alpha_sq);
  Matrix scaled(omega.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) {
    scaled.col(j) = scale * x(edge_tails[active[j]]) * omega.col(active[j]);
  }
  const bool rows_smaller = scaled.rows() < scaled.cols();
  if (route == SpectrumRoute::kMeasurementGram || (route == SpectrumRoute::kAuto && rows_smaller)) {
    Matrix gram = scaled * scaled.transpose();
    return spectrum_of_gram(0.5 * (gram + gram.transpose()), edges);
  }
  Matrix gram = scaled.transpose() * scaled;
  return spectrum_of_gram(0.5 * (gram + gram.transpose()), edges);
}

TailEvaluator::TailEvaluator(const Matrix& omega, std::span<const NodeId> edge_tails,
                             int node_count, double sigma_alpha_sq)
    : tails_(edge_tails.begin(), edge_tails.end()), node_count_(node_count) {
  if (node_count < 1) throw std::invalid_argument("node_count must be positive");
  if (static_cast<Eigen::Index>(tails_.size()) != omega.cols()) {
    throw std::invalid_argument("edge tail count does not match omega columns");
  }
  for (NodeId v : tails_) {
    if (v < 0 || v >= node_count) throw std::invalid_argument("edge tail outside message range");
  }
  if (!(sigma_alpha_sq > 0.0)) throw std::invalid_argument("sigma_alpha_sq must be positive");
  use_edge_gram_ = omega.rows() >= omega.cols();
  if (use_edge_gram_) {
    Matrix gram = sigma_alpha_sq * (omega.transpose() * omega);
    factor_ = 0.5 * (gram + gram.transpose());
  } else {
    factor_ = std::sqrt(sigma_alpha_sq) * omega;
  }
}

TailSpectrum TailEvaluator::spectrum(const Vector& x) const {
  if (x.size() != node_count_) throw std::invalid_argument("x has the wrong length");
  if (std::abs(x.norm() - 1.0) > kUnitNormTolerance) {
    throw std::invalid_argument("x must have unit norm");
  }
  std::vector<Eigen::Index> active;
  for (std::size_t e = 0; e < tails_.size(); ++e) {
    if (x(tails_[e]) != 0.0) active.push_back(static_cast<Eigen::Index>(e));
  }
  const auto a = static_cast<Eigen::Index>(active.size());
  if (use_edge_gram_) {
    Matrix gram(a, a);
    for (Eigen::Index j = 0; j < a; ++j) {
      const double xj = x(tails_[active[j]]);
      for (Eigen::Index i = 0; i < a; ++i) {
        gram(i, j) = x(tails_[active[i]]) * xj * factor_(active[i], active[j]);
      }
    }
    return spectrum_of_gram(0.5 * (gram + gram.transpose()), tails_.size());
  }
  Matrix scaled(factor_.rows(), a);
  for (Eigen::Index j = 0; j < a; ++j) scaled.col(j) = x(tails_[active[j]]) * factor_.col(active[j]);
  Matrix gram = scaled.rows() < a ? Matrix(scaled * scaled.transpose())
                                  : Matrix(scaled.transpose() * scaled);
  return spectrum_of_gram(0.5 * (gram + gram.transpose()), tails_.size());
}

double TailEvaluator::tail(const Vector& x, TailQuery q) const {
  return tail_probability_weighted_chisq(spectrum(x), q);
}

double tail_probability_weighted_chisq(const TailSpectrum& spectrum, TailQuery q) {
  if (spectrum.lambdas.empty()) throw std::invalid_argument("empty spectrum");
  return tail::deviation_probability(tail::weighted_chisq(spectrum.lambdas), q.epsilon);
}

double tail_probability_gaussian(int m, TailQuery q) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  return tail::deviation_probability(tail::scaled_chisq(m), q.epsilon);
}

MonteCarloEstimate tail_probability_monte_carlo(const TailSpectrum& spectrum, TailQuery q,
                                                long sample_count, std::uint64_t seed) {
  if (sample_count < 10000) throw std::invalid_argument("need at least 1e4 samples");
  std::vector<double> weights;
  for (double l : spectrum.lambdas) {
    if (l > 0.0) weights.push_back(l);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  long hits = 0;
  for (long i = 0; i < sample_count; ++i) {
    double s = 0.0;
    for (double l : weights) {
      const double g = normal(rng);
      s += l * g * g;
    }
    hits += std::abs(s - 1.0) >= q.epsilon;
  }
  const double p = static_cast<double>(hits) / sample_count;
  return {p, std::sqrt(p * (1.0 - p) / sample_count)};
}

WorstCaseResult worst_case_tail(const Matrix& omega, std::span<const NodeId> edge_tails,
                                int node_count, double sigma_alpha_sq, TailQuery q,
                                const SearchBudget& budget) {
  if (budget.random_starts < 0 || budget.refine_starts < 0 || budget.max_sweeps < 0 ||
      !(budget.initial_step > 0.0) || !(budget.min_step > 0.0)) {
    throw std::invalid_argument("search budget must be positive");
  }

  const TailEvaluator evaluator(omega, edge_tails, node_count, sigma_alpha_sq);
  auto evaluate = [&](const Vector& x) { return evaluator.tail(x, q); };

  // Starting directions: canonical first, then seeded random.
  const std::size_t starts = static_cast<std::size_t>(node_count) + budget.random_starts;
  std::vector<Vector> x(starts);
  std::vector<double> value(starts, 0.0);
  parallel_for(starts, budget.workers, [&](std::size_t i) {
    if (i < static_cast<std::size_t>(node_count)) {
      x[i] = Vector::Unit(node_count, static_cast<Eigen::Index>(i));
    } else {
      std::mt19937_64 rng(derive_seed(budget.seed, {i}));
      std::normal_distribution<double> normal;
      Vector v(node_count);
      do {
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = normal(rng);
      } while (v.norm() == 0.0);
      x[i] = v / v.norm();
    }
    value[i] = evaluate(x[i]);
  });
  long evaluations = static_cast<long>(starts);

  std::vector<std::size_t> order(starts);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });

  const std::size_t refine = std::min<std::size_t>(budget.refine_starts, starts);
  std::vector<long> refine_evals(refine, 0);
  parallel_for(refine, budget.workers, [&](std::size_t r) {
    const std::size_t i = order[r];
    Vector best = x[i];
    double best_value = value[i];
    double step = budget.initial_step;
    for (int sweep = 0; sweep < budget.max_sweeps && step >= budget.min_step; ++sweep) {
      if (best_value >= 1.0) break;
      bool improved = false;
      for (int j = 0; j < node_count; ++j) {
        for (double sign : {1.0, -1.0}) {
          Vector trial = best;
          trial(j) += sign * step;
          const double norm = trial.norm();
          if (norm == 0.0) continue;
          trial /= norm;
          const double v = evaluate(trial);
          ++refine_evals[r];
          if (v > best_value) {
            best_value = v;
            best = std::move(trial);
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    x[i] = std::move(best);
    value[i] = best_value;
  });
  for (long e : refine_evals) evaluations += e;

  std::size_t winner = 0;
  for (std::size_t i = 1; i < starts; ++i) {
    if (value[i] > value[winner]) winner = i;
  }
  return {value[winner], x[winner], evaluations};
}

WorstCaseResult worst_case_tail(const Matrix& omega, const NetworkGraph& g,
                                double sigma_alpha_sq, TailQuery q, const SearchBudget& budget) {
  return worst_case_tail(omega, g.edge_tails(), g.node_count(), sigma_alpha_sq, q, budget);
}

double rip_epsilon(double delta_k) { return delta_k / std::sqrt(2.0); }

RipBound rip_bound(double p_tail, int n, int k, double delta_k) {
  if (!(delta_k > 0.0 && delta_k < 1.0)) throw std::invalid_argument("delta_k must lie in (0, 1)");
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
  if (!(p_tail >= 0.0 && p_tail <= 1.0)) throw std::invalid_argument("p_tail must lie in [0, 1]");
  RipBound b{n, k, delta_k, p_tail, 1.0, false};
  if (p_tail == 0.0) return b;
  const double log_binomial =
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  const double log_union = log_binomial + k * std::log(42.0 / delta_k) + std::log(p_tail);
  if (log_union >= 0.0) {
    b.p_rip = 0.0;
    b.vacuous = true;
  } else {
    b.p_rip = -std::expm1(log_union);
  }
  return b;
}

double rip_lower_bound(double p_tail, int n, int k, double delta_k) {
  return rip_bound(p_tail, n, k, delta_k).p_rip;
}

void write_tail_curve(std::ostream& os, std::span<const TailCurveRecord> records) {
  os << "deployment,m,epsilon,p_tail_qnc,p_tail_gauss\n";
  for (const TailCurveRecord& r : records) {
    os << r.deployment << ',' << r.m << ',' << text_io::format_double(r.epsilon) << ','
       << text_io::format_double(r.p_tail_qnc) << ',' << text_io::format_double(r.p_tail_gauss)
       << '\n';
  }
}

}  // namespace qnc
