#pragma once

#include "qnc/common.hpp"
#include "qnc/network_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace qnc {

// How the mixing coefficients evolve with time.
enum class BetaPolicy {
  kPerStep,   // fresh orthonormal rows for every t
  kConstant,  // one draw reused for all t
};

// Weights of the gateway extraction matrix B(t). Either way B(t) has one
// nonzero per row, at the gateway's i-th incoming edge.
enum class GatewayWeights {
  kIdentity,
  kGaussian,
};

struct CoefficientOptions {
  BetaPolicy beta_policy = BetaPolicy::kPerStep;
  GatewayWeights gateway_weights = GatewayWeights::kIdentity;
  // Overrides the calibrated alpha variance when set.
  std::optional<double> sigma_alpha_sq;
};

// Network coding coefficients for times 2..final_time.
//
//  - alpha2 is |E| x n with a single nonzero per row, at (e, tail(e)),
//    i.i.d. N(0, sigma_alpha_sq). Injection at t > 2 is identically zero.
//  - mixing[t - 3] is F(t) for t = 3..final_time: entry (e, e') is nonzero
//    only when tail(e) == head(e'); for each node the rows of distinct
//    outgoing edges are orthonormal (or zero once |Out| exceeds |In|).
//  - extraction[t - 2] is B(t), |In(v0)| x |E|.
struct CoefficientSchedule {
  int final_time = 2;
  std::uint64_t seed = 0;
  double sigma_alpha_sq = 1.0;
  Matrix alpha2;
  std::vector<SparseMatrix> mixing;
  std::vector<SparseMatrix> extraction;

  const SparseMatrix& F(int t) const;
  const SparseMatrix& B(int t) const;
  // A(t): alpha2 at t == 2, zero afterwards.
  Matrix A(int t) const;
};

// Draws coefficients for a deployment. Mixing and extraction matrices for a
// given t depend only on (seed, t, node), so schedules drawn with the same
// seed for different final times agree on their common prefix.
CoefficientSchedule draw_coefficients(const NetworkGraph& g, int final_time,
                                      std::uint64_t seed,
                                      const CoefficientOptions& options = {});

// Fresh alpha2 with the given variance, keeping the sparsity of A(2).
Matrix draw_alpha(const NetworkGraph& g, double sigma_alpha_sq, std::mt19937_64& rng);
Matrix draw_alpha(const NetworkGraph& g, double sigma_alpha_sq, std::uint64_t seed);

// Copy of `sched` with alpha2 replaced.
CoefficientSchedule with_alpha(const CoefficientSchedule& sched, Matrix alpha2);

enum class OmegaRoute {
  kAuto,
  kForwardProduct,  // carry the dense product F(t)...F(3)
  kBackwardThin,    // push B(t)^T back through F(t)^T ... F(3)^T
};

// Stacked [B(2); B(3)F(3); ...; B(T)F(T)...F(3)], m x |E| with
// m = (T - 1) |In(v0)| for identity-shaped extraction.
Matrix build_omega(const CoefficientSchedule& sched, const NetworkGraph& g,
                   int final_time, OmegaRoute route = OmegaRoute::kAuto);

// n / ||omega||_F^2: the variance that makes the sphere average of
// E||Psi_tot x||^2 equal one.
double calibrate_alpha_variance(const Matrix& omega, int node_count);

enum class QuantizerMode { kDisabled, kUniform };

// Per-edge uniform mid-rise quantizers over [-q_max, q_max] with
// 2^ceil(rate_bits[e]) levels.
struct QuantizerSpec {
  QuantizerMode mode = QuantizerMode::kDisabled;
  std::vector<double> rate_bits;
  double q_max = 1.0;

  static QuantizerSpec disabled();
  // rate_bits[e] = block_length * C_e
  static QuantizerSpec from_capacities(const NetworkGraph& g, double block_length,
                                       double q_max);
  static QuantizerSpec uniform_bits(int edge_count, double bits, double q_max);

  double levels(EdgeId e) const;
  double step(EdgeId e) const;
};

struct QuantizedValue {
  double value = 0.0;
  bool saturated = false;
};

QuantizedValue quantize_uniform(double input, double levels, double q_max);

struct NetworkState {
  int t = 1;
  Vector y;                      // edge contents y(t)
  std::vector<Vector> noise_log;  // n(2), n(3), ..., n(t)
  long saturations = 0;
};

// Rest state at t = 1.
NetworkState initial_state(const NetworkGraph& g);

// One network use: y(t+1) = Q[F(t+1) y(t) + A(t+1) x].
NetworkState step(const NetworkState& state, const CoefficientSchedule& sched,
                  const NetworkGraph& g, const QuantizerSpec& quant, const Vector& x);

struct MeasurementSystem {
  int final_time = 2;
  double sigma_alpha_sq = 1.0;
  Matrix omega;    // m x |E|
  Matrix alpha2;   // |E| x n
  Matrix psi_tot;  // m x n, omega * alpha2

  int m() const { return static_cast<int>(omega.rows()); }
};

MeasurementSystem measurement_system(const CoefficientSchedule& sched,
                                     const NetworkGraph& g, int final_time);

struct QncRun {
  Vector z_tot;         // z(2); ...; z(T)
  Vector noise_effect;  // z_tot - psi_tot x
  MeasurementSystem system;
  NetworkState state;   // final state, including the per-step noise log
};

QncRun run_qnc(const NetworkGraph& g, const CoefficientSchedule& sched,
               const QuantizerSpec& quant, const Vector& x, int final_time);

// q_max default: `multiple` times the standard deviation of edge contents in
// an unquantized dry run over t = 2..T. Returns 1 when the contents are all
// zero.
double estimate_dynamic_range(const NetworkGraph& g, const CoefficientSchedule& sched,
                              const Vector& x, int final_time, double multiple = 4.0);

// Text form:
//   qnc-measurement-system 1
//   final_time <T>
//   sigma_alpha_sq <v>
//   omega <m> <|E|>     rows...
//   alpha2 <|E|> <n>    rows...
//   psi_tot <m> <n>     rows...
void save_measurement_system(std::ostream& os, const MeasurementSystem& sys);
MeasurementSystem load_measurement_system(std::istream& is);

}  // namespace qnc
