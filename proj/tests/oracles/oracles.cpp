#include "oracles.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

double gaussian_tail(int m, double eps) {
  boost::math::chi_squared dist(m);
  const double upper = boost::math::cdf(boost::math::complement(dist, m * (1.0 + eps)));
  const double lower = eps < 1.0 ? boost::math::cdf(dist, m * (1.0 - eps)) : 0.0;
  return upper + lower;
}

namespace {

constexpr double kPivotTol = 1e-10;

void pivot(Matrix& t, std::vector<int>& basis, int r, int c) {
  t.row(r) /= t(r, c);
  for (int i = 0; i < t.rows(); ++i) {
    if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
  }
  basis[r] = c;
}

// Bland's rule on columns [0, allowed). The last row holds reduced costs and
// minus the objective; the last column the right-hand side.
bool simplex(Matrix& t, std::vector<int>& basis, int allowed) {
  const int m = static_cast<int>(t.rows()) - 1;
  const int rhs = static_cast<int>(t.cols()) - 1;
  for (int guard = 0; guard < 100000; ++guard) {
    int enter = -1;
    for (int j = 0; j < allowed; ++j) {
      if (t(m, j) < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t(i, enter) <= kPivotTol) continue;
      const double ratio = t(i, rhs) / t(i, enter);
      if (leave < 0 || ratio < best - 1e-14 ||
          (std::abs(ratio - best) <= 1e-14 && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) throw std::runtime_error("LP unbounded");
    pivot(t, basis, leave, enter);
  }
  throw std::runtime_error("simplex cycling guard hit");
}

}  // namespace

std::optional<Vector> basis_pursuit_lp(const Matrix& theta, const Vector& z) {
  const int m = static_cast<int>(theta.rows());
  const int n = static_cast<int>(theta.cols());
  const int vars = 2 * n;
  Matrix t = Matrix::Zero(m + 1, vars + m + 1);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    const double flip = z(i) < 0 ? -1.0 : 1.0;
    t.block(i, 0, 1, n) = flip * theta.row(i);
    t.block(i, n, 1, n) = -flip * theta.row(i);
    t(i, vars + i) = 1.0;
    t(i, vars + m) = flip * z(i);
    basis[i] = vars + i;
  }
  // Phase 1: minimize the sum of artificials.
  for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (int i = 0; i < m; ++i) t(m, vars + i) = 0.0;
  simplex(t, basis, vars + m);
  if (-t(m, vars + m) > 1e-8 * (1.0 + z.lpNorm<1>())) return std::nullopt;
  for (int i = 0; i < m; ++i) {
    if (basis[i] < vars) continue;
    for (int j = 0; j < vars; ++j) {
      if (std::abs(t(i, j)) > 1e-9) {
        pivot(t, basis, i, j);
        break;
      }
    }
  }
  // Phase 2: cost 1 on every original column.
  t.row(m).setZero();
  t.block(m, 0, 1, vars).setOnes();
  for (int i = 0; i < m; ++i) {
    if (basis[i] < vars) t.row(m) -= t.row(i);
  }
  simplex(t, basis, vars);

  Vector w = Vector::Zero(vars);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < vars) w(basis[i]) = t(i, vars + m);
  }
  return Vector(w.head(n) - w.tail(n));
}

Vector bpdn_homotopy(const Matrix& theta, const Vector& z, double eps) {
  const int n = static_cast<int>(theta.cols());
  Vector s = Vector::Zero(n);
  Vector r = z;
  if (r.norm() <= eps) return s;

  Vector c = theta.transpose() * r;
  Eigen::Index first = 0;
  double lambda = c.cwiseAbs().maxCoeff(&first);
  std::vector<int> active{static_cast<int>(first)};
  int dropped = -1;

  for (int iter = 0; iter < 20 * n + 100; ++iter) {
    const int k = static_cast<int>(active.size());
    Matrix ta(theta.rows(), k);
    Vector sign(k);
    for (int i = 0; i < k; ++i) {
      ta.col(i) = theta.col(active[i]);
      sign(i) = c(active[i]) > 0 ? 1.0 : -1.0;
    }
    const Vector d = (ta.transpose() * ta).ldlt().solve(sign);
    const Vector u = ta * d;
    const Vector a = theta.transpose() * u;

    double gamma = lambda;
    int join = -1, leave = -1;
    for (int j = 0; j < n; ++j) {
      if (j == dropped || std::find(active.begin(), active.end(), j) != active.end()) continue;
      for (double cand : {(lambda - c(j)) / (1.0 - a(j)), (lambda + c(j)) / (1.0 + a(j))}) {
        if (cand > 1e-14 && cand < gamma) {
          gamma = cand;
          join = j;
        }
      }
    }
    for (int i = 0; i < k; ++i) {
      const double cand = -s(active[i]) / d(i);
      if (cand > 1e-14 && cand < gamma) {
        gamma = cand;
        leave = i;
        join = -1;
      }
    }

    // Does the residual reach eps inside this segment?
    const double uu = u.squaredNorm(), ru = r.dot(u), rr = r.squaredNorm();
    const double disc = ru * ru - uu * (rr - eps * eps);
    if (uu > 0.0 && disc >= 0.0) {
      const double hit = (ru - std::sqrt(disc)) / uu;
      if (hit >= 0.0 && hit <= gamma) {
        for (int i = 0; i < k; ++i) s(active[i]) += hit * d(i);
        return s;
      }
    }

    for (int i = 0; i < k; ++i) s(active[i]) += gamma * d(i);
    r = z - theta * s;
    c = theta.transpose() * r;
    lambda -= gamma;
    dropped = -1;
    if (leave >= 0) {
      s(active[leave]) = 0.0;
      dropped = active[leave];
      active.erase(active.begin() + leave);
    } else if (join >= 0) {
      active.push_back(join);
    } else {
      throw std::runtime_error("homotopy reached lambda = 0 above the noise radius");
    }
  }
  throw std::runtime_error("homotopy did not terminate");
}

Matrix omega_dense(const qnc::CoefficientSchedule& sched, int final_time) {
  std::vector<Matrix> blocks;
  Eigen::Index rows = 0;
  for (int t = 2; t <= final_time; ++t) {
    Matrix block = Matrix(sched.B(t));
    for (int u = t; u >= 3; --u) block = block * Matrix(sched.F(u));
    rows += block.rows();
    blocks.push_back(std::move(block));
  }
  Matrix out(rows, blocks.front().cols());
  Eigen::Index at = 0;
  for (const Matrix& b : blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

Vector unrolled_noise(const qnc::CoefficientSchedule& sched, const std::vector<Vector>& noise_log,
                      int final_time) {
  std::vector<Vector> blocks;
  Eigen::Index rows = 0;
  for (int t = 2; t <= final_time; ++t) {
    Vector acc = Vector::Zero(sched.B(t).rows());
    for (int tp = 2; tp <= t; ++tp) {
      Vector v = noise_log.at(tp - 2);
      for (int u = tp + 1; u <= t; ++u) v = Matrix(sched.F(u)) * v;
      acc += Matrix(sched.B(t)) * v;
    }
    rows += acc.size();
    blocks.push_back(std::move(acc));
  }
  Vector out(rows);
  Eigen::Index at = 0;
  for (const Vector& b : blocks) {
    out.segment(at, b.size()) = b;
    at += b.size();
  }
  return out;
}

}  // namespace oracle
