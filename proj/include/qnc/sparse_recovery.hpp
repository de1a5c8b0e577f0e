#pragma once

#include "qnc/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qnc {

enum class NonzeroLaw { kRademacher, kGaussian };

struct SparseSignal {
  Vector s;
  int k = 0;
  std::vector<int> support;  // ascending
  NonzeroLaw law = NonzeroLaw::kGaussian;
};

// Support uniform over k-subsets of {0..n-1}, nonzeros i.i.d. from `law`.
// k = 0 gives the zero vector.
SparseSignal generate_sparse_message(int n, int k, NonzeroLaw law, std::uint64_t seed);

struct SparsifyingBasis {
  Matrix phi;  // n x n, orthonormal

  static SparsifyingBasis identity(int n);
};

// Q factor of a seeded Gaussian matrix, column signs fixed by diag(R).
SparsifyingBasis random_orthonormal_basis(int n, std::uint64_t seed);

struct RecoveryProblem {
  Vector z;                    // m measurements
  Matrix theta;                // m x n sensing matrix
  double noise_radius = 0.0;   // ε_n
  std::optional<Vector> truth;  // for scoring only
};

// Raised when no s satisfies ‖θs - z‖ <= ε_n.
class InfeasibleProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DecoderOptions {
  double tolerance = 1e-9;
  long max_iterations = 100000;
  // Support polish is attempted every this many primal-dual iterations.
  int polish_interval = 25;
};

struct DecodeResult {
  Vector s;
  double l1_norm = 0.0;
  double residual_norm = 0.0;
  long iterations = 0;
  // True when the KKT conditions were verified on the returned support.
  bool certified = false;
};

// minimize ‖s‖₁ subject to ‖θs - z‖₂ <= ε_n.
//
// Chambolle-Pock primal-dual iterations on ‖s‖₁ + ι_{B(z, ε_n)}(θs). Every
// `polish_interval` steps the current support and signs are frozen and the
// exact solution for that support is computed in closed form:
//   s_S = G⁻¹(θ_Sᵀz - γ sgn),  G = θ_SᵀθS,
// with γ fixed by ‖θs - z‖ = ε_n. It is accepted when the signs agree and
// |θ_jᵀ r| <= γ off the support (for ε_n = 0, the limiting dual
// y = θ_S G⁻¹ sgn with |θ_jᵀ y| <= 1). Otherwise iterations continue until
// the objective change over a polish interval is below `tolerance` with the
// residual within `tolerance` of ε_n.
//
// Throws InfeasibleProblem when ε_n is below the least-squares residual and
// NumericalError when the iteration cap is hit.
DecodeResult l1_min_decode(const RecoveryProblem& p, const DecoderOptions& options = {});

struct RecoveryMetrics {
  double coefficient_error = 0.0;  // ‖ŝ - s‖
  double message_error = 0.0;      // ‖φŝ - φs‖
  double support_precision = 1.0;
  double support_recall = 1.0;
  // 10 log10(‖s‖² / ‖ŝ - s‖²); +inf for exact recovery.
  double sdr_db = 0.0;
};

// Entries with |ŝ_i| > support_threshold * max(1, ‖s‖∞) count as support.
RecoveryMetrics recovery_report(const Vector& s_hat, const Vector& s_true, const Matrix& phi,
                                double support_threshold = 1e-6);

// Text forms, same layout as the measurement system file:
//   qnc-recovery-problem 1 / noise_radius / theta / z / [truth]
//   qnc-recovery-solution 1 / certified / s_hat
void save_problem(std::ostream& os, const RecoveryProblem& p);
RecoveryProblem load_problem(std::istream& is);
void save_solution(std::ostream& os, const DecodeResult& r);
DecodeResult load_solution(std::istream& is);

// One delimited record per instance; write_metrics_header first.
void write_metrics_header(std::ostream& os);
void write_metrics_record(std::ostream& os, std::string_view id, const RecoveryMetrics& m);

}  // namespace qnc
