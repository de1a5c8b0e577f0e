#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace qnc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

using NodeId = int;
using EdgeId = int;

/// Raised when a numerical routine (quadrature, solver, eigensolver) fails
/// to reach its accuracy contract. Distinct from bad input, which is
/// reported with std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixes a master seed with a key path into an independent stream seed.
/// Used so that results never depend on evaluation order or worker count.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> key);

// Run fn(i) for i in [0, count) on up to `workers` threads (0 = hardware
// concurrency). The first exception by index is rethrown after all workers
// stop.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace qnc
