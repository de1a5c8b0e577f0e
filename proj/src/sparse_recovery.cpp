#include "qnc/sparse_recovery.hpp"

#include "qnc/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace qnc {

namespace {

Vector soft_threshold(const Vector& v, double t) {
  return v.unaryExpr([t](double a) {
    if (a > t) return a - t;
    if (a < -t) return a + t;
    return 0.0;
  });
}

// Exact minimizer for a frozen support and sign pattern, if the KKT
// conditions certify it.
std::optional<Vector> polish_support(const Matrix& theta, const Vector& z, double radius,
                                     const Vector& s, const Vector& dual_hint, double tol,
                                     double rel_floor) {
  std::vector<Eigen::Index> support;
  const double floor = rel_floor * std::max(1.0, s.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (std::abs(s(j)) > floor) support.push_back(j);
  }
  if (support.empty() || static_cast<Eigen::Index>(support.size()) > theta.rows()) {
    return std::nullopt;
  }

  const Eigen::Index k = static_cast<Eigen::Index>(support.size());
  Matrix theta_s(theta.rows(), k);
  Vector sign(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    theta_s.col(i) = theta.col(support[i]);
    sign(i) = s(support[i]) > 0 ? 1.0 : -1.0;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(theta_s);
  if (qr.rank() < k) return std::nullopt;

  const Vector ls = qr.solve(z);
  const Vector ls_residual = z - theta_s * ls;
  // G⁻¹ sgn via the same factorization: G⁻¹ = (θ_SᵀθS)⁻¹.
  const Matrix gram = theta_s.transpose() * theta_s;
  Eigen::LDLT<Matrix> ldlt(gram);
  const Vector w = ldlt.solve(sign);
  const double curvature = sign.dot(w);
  if (!(curvature > 0.0)) return std::nullopt;

  auto dual_ok = [&](const Vector& dual) {
    const Vector correlation = theta.transpose() * dual;
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
      if (std::find(support.begin(), support.end(), j) != support.end()) continue;
      if (std::abs(correlation(j)) > 1.0 + 1e-9) return false;
    }
    return true;
  };

  Vector coef;
  std::vector<Vector> duals;  // candidates scaled so that θ_Sᵀ dual = sgn
  const double slack = radius * radius - ls_residual.squaredNorm();
  if (radius == 0.0 || slack <= tol * tol) {
    // Equality-constrained limit: the dual is not unique. Try the min-norm
    // one, then the iterate's dual moved onto θ_Sᵀ y = sgn.
    if (ls_residual.norm() > radius + tol) return std::nullopt;
    coef = ls;
    duals.push_back(theta_s * w);
    duals.push_back(dual_hint + theta_s * ldlt.solve(sign - theta_s.transpose() * dual_hint));
  } else {
    const double gamma = std::sqrt(slack / curvature);
    coef = ls - gamma * w;
    duals.push_back((z - theta_s * coef) / gamma);
  }

  for (Eigen::Index i = 0; i < k; ++i) {
    if (coef(i) * sign(i) <= 0.0) return std::nullopt;
  }
  if (std::none_of(duals.begin(), duals.end(), dual_ok)) return std::nullopt;

  Vector out = Vector::Zero(theta.cols());
  for (Eigen::Index i = 0; i < k; ++i) out(support[i]) = coef(i);
  return out;
}

// Iterates carry small spurious entries near convergence; try coarser
// supports before giving up.
std::optional<Vector> polish(const Matrix& theta, const Vector& z, double radius, const Vector& s,
                             const Vector& dual_hint, double tol) {
  for (double rel_floor : {1e-12, 1e-8, 1e-5, 1e-3}) {
    if (auto out = polish_support(theta, z, radius, s, dual_hint, tol, rel_floor)) return out;
  }
  return std::nullopt;
}

DecodeResult make_result(const RecoveryProblem& p, Vector s, long iterations, bool certified) {
  DecodeResult r;
  r.l1_norm = s.lpNorm<1>();
  r.residual_norm = (p.theta * s - p.z).norm();
  r.s = std::move(s);
  r.iterations = iterations;
  r.certified = certified;
  return r;
}

}  // namespace

SparseSignal generate_sparse_message(int n, int k, NonzeroLaw law, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (k < 0 || k > n) throw std::invalid_argument("sparsity must satisfy 0 <= k <= n");
  std::mt19937_64 rng(seed);
  std::vector<int> index(n);
  std::iota(index.begin(), index.end(), 0);
  // Partial Fisher-Yates: the first k entries are a uniform k-subset.
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(index[i], index[pick(rng)]);
  }
  SparseSignal sig;
  sig.k = k;
  sig.law = law;
  sig.support.assign(index.begin(), index.begin() + k);
  std::sort(sig.support.begin(), sig.support.end());
  sig.s = Vector::Zero(n);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin;
  for (int j : sig.support) {
    sig.s(j) = law == NonzeroLaw::kRademacher ? (coin(rng) ? 1.0 : -1.0) : normal(rng);
  }
  return sig;
}

SparsifyingBasis SparsifyingBasis::identity(int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  return {Matrix::Identity(n, n)};
}

SparsifyingBasis random_orthonormal_basis(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return {q};
}

DecodeResult l1_min_decode(const RecoveryProblem& p, const DecoderOptions& options) {
  const Matrix& theta = p.theta;
  const Vector& z = p.z;
  const double radius = p.noise_radius;
  const double tol = options.tolerance;
  if (theta.rows() != z.size()) throw std::invalid_argument("theta rows must match z");
  if (!(radius >= 0.0)) throw std::invalid_argument("noise radius must be nonnegative");
  if (theta.size() == 0 || theta.isZero(0.0)) throw std::invalid_argument("theta is zero");

  if (z.norm() <= radius) return make_result(p, Vector::Zero(theta.cols()), 0, true);

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(theta);
  const double min_residual = (theta * cod.solve(z) - z).norm();
  if (min_residual > radius + tol) {
    throw InfeasibleProblem("noise radius " + text_io::format_double(radius) +
                            " below least-squares residual " +
                            text_io::format_double(min_residual));
  }

  const double norm = theta.bdcSvd().singularValues()(0);
  const double tau = 0.99 / norm;
  const double sigma = 0.99 / norm;

  Vector s = Vector::Zero(theta.cols());
  Vector s_bar = s;
  Vector y = Vector::Zero(theta.rows());
  double last_objective = std::numeric_limits<double>::infinity();

  for (long it = 1; it <= options.max_iterations; ++it) {
    // Dual step: prox of the conjugate of the ball indicator (Moreau).
    const Vector v = y + sigma * (theta * s_bar);
    const Vector centered = v / sigma - z;
    const double dist = centered.norm();
    const Vector projected = dist <= radius ? Vector(v / sigma) : Vector(z + (radius / dist) * centered);
    y = v - sigma * projected;

    const Vector s_next = soft_threshold(s - tau * (theta.transpose() * y), tau);
    s_bar = 2.0 * s_next - s;
    s = s_next;

    if (it % options.polish_interval != 0) continue;
    // Optimality reads -θᵀy ∈ ∂‖s‖₁, so -y is the certificate candidate.
    if (auto exact = polish(theta, z, radius, s, -y, tol)) {
      return make_result(p, std::move(*exact), it, true);
    }
    const double objective = s.lpNorm<1>();
    const double residual = (theta * s - z).norm();
    if (std::abs(objective - last_objective) < tol * (1.0 + objective) &&
        residual <= radius + tol) {
      return make_result(p, std::move(s), it, false);
    }
    last_objective = objective;
  }
  throw NumericalError("l1 decoder did not converge within " +
                       std::to_string(options.max_iterations) + " iterations");
}

RecoveryMetrics recovery_report(const Vector& s_hat, const Vector& s_true, const Matrix& phi,
                                double support_threshold) {
  if (s_hat.size() != s_true.size() || phi.cols() != s_true.size()) {
    throw std::invalid_argument("dimension mismatch in recovery report");
  }
  RecoveryMetrics m;
  const Vector diff = s_hat - s_true;
  m.coefficient_error = diff.norm();
  m.message_error = (phi * diff).norm();

  const double cut = support_threshold * std::max(1.0, s_true.cwiseAbs().maxCoeff());
  int estimated = 0, actual = 0, common = 0;
  for (Eigen::Index i = 0; i < s_true.size(); ++i) {
    const bool in_hat = std::abs(s_hat(i)) > cut;
    const bool in_true = s_true(i) != 0.0;
    estimated += in_hat;
    actual += in_true;
    common += in_hat && in_true;
  }
  m.support_precision = estimated ? static_cast<double>(common) / estimated : 1.0;
  m.support_recall = actual ? static_cast<double>(common) / actual : 1.0;

  const double signal = s_true.squaredNorm();
  const double error = diff.squaredNorm();
  if (error == 0.0) {
    m.sdr_db = std::numeric_limits<double>::infinity();
  } else if (signal == 0.0) {
    m.sdr_db = -std::numeric_limits<double>::infinity();
  } else {
    m.sdr_db = 10.0 * std::log10(signal / error);
  }
  return m;
}

void save_problem(std::ostream& os, const RecoveryProblem& p) {
  os << "qnc-recovery-problem 1\n"
     << "noise_radius " << text_io::format_double(p.noise_radius) << '\n';
  text_io::write_matrix(os, "theta", p.theta);
  text_io::write_vector(os, "z", p.z);
  os << "has_truth " << (p.truth ? 1 : 0) << '\n';
  if (p.truth) text_io::write_vector(os, "truth", *p.truth);
}

RecoveryProblem load_problem(std::istream& is) {
  text_io::expect_token(is, "qnc-recovery-problem");
  int version = 0;
  if (!(is >> version) || version != 1) throw std::invalid_argument("unsupported problem version");
  RecoveryProblem p;
  p.noise_radius = text_io::read_scalar(is, "noise_radius");
  p.theta = text_io::read_matrix(is, "theta");
  p.z = text_io::read_vector(is, "z");
  if (text_io::read_scalar(is, "has_truth") != 0.0) p.truth = text_io::read_vector(is, "truth");
  if (p.z.size() != p.theta.rows()) throw std::invalid_argument("problem dimension mismatch");
  return p;
}

void save_solution(std::ostream& os, const DecodeResult& r) {
  os << "qnc-recovery-solution 1\n"
     << "certified " << (r.certified ? 1 : 0) << '\n'
     << "iterations " << r.iterations << '\n'
     << "l1_norm " << text_io::format_double(r.l1_norm) << '\n'
     << "residual_norm " << text_io::format_double(r.residual_norm) << '\n';
  text_io::write_vector(os, "s_hat", r.s);
}

DecodeResult load_solution(std::istream& is) {
  text_io::expect_token(is, "qnc-recovery-solution");
  int version = 0;
  if (!(is >> version) || version != 1) throw std::invalid_argument("unsupported solution version");
  DecodeResult r;
  r.certified = text_io::read_scalar(is, "certified") != 0.0;
  r.iterations = static_cast<long>(text_io::read_scalar(is, "iterations"));
  r.l1_norm = text_io::read_scalar(is, "l1_norm");
  r.residual_norm = text_io::read_scalar(is, "residual_norm");
  r.s = text_io::read_vector(is, "s_hat");
  return r;
}

void write_metrics_header(std::ostream& os) {
  os << "id,coefficient_error,message_error,support_precision,support_recall,sdr_db\n";
}

void write_metrics_record(std::ostream& os, std::string_view id, const RecoveryMetrics& m) {
  os << id << ',' << text_io::format_double(m.coefficient_error) << ','
     << text_io::format_double(m.message_error) << ','
     << text_io::format_double(m.support_precision) << ','
     << text_io::format_double(m.support_recall) << ',' << text_io::format_double(m.sdr_db)
     << '\n';
}

}  // namespace qnc
