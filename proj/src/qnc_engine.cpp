#include "qnc/qnc_engine.hpp"

#include "qnc/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace qnc {

namespace {

constexpr std::uint64_t kBetaTag = 1;
constexpr std::uint64_t kAlphaTag = 2;
constexpr std::uint64_t kGatewayTag = 3;

// Orthonormal rows for the |Out| x |In| local mixing block of one node.
Matrix orthonormal_rows(int rows, int cols, std::mt19937_64& rng) {
  Matrix w = Matrix::Zero(rows, cols);
  if (rows == 0 || cols == 0) return w;
  std::normal_distribution<double> normal;
  Matrix g(cols, rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(j, i) = normal(rng);
  }
  const int r = std::min(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(cols, r);
  w.topRows(r) = q.transpose();
  return w;
}

SparseMatrix draw_mixing(const NetworkGraph& g, std::uint64_t seed, std::uint64_t time_key) {
  const int edges = g.edge_count();
  std::vector<Eigen::Triplet<double>> entries;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto in = g.incoming_edges(v);
    auto out = g.outgoing_edges(v);
    if (in.empty() || out.empty()) continue;
    std::mt19937_64 rng(derive_seed(seed, {kBetaTag, time_key, static_cast<std::uint64_t>(v)}));
    Matrix w = orthonormal_rows(static_cast<int>(out.size()), static_cast<int>(in.size()), rng);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < in.size(); ++j) {
        if (w(i, j) != 0.0) entries.emplace_back(out[i], in[j], w(i, j));
      }
    }
  }
  SparseMatrix f(edges, edges);
  f.setFromTriplets(entries.begin(), entries.end());
  return f;
}

SparseMatrix draw_extraction(const NetworkGraph& g, std::uint64_t seed, int t,
                             GatewayWeights weights) {
  auto in = g.incoming_edges(g.gateway());
  SparseMatrix b(static_cast<Eigen::Index>(in.size()), g.edge_count());
  std::vector<Eigen::Triplet<double>> entries;
  std::mt19937_64 rng(derive_seed(seed, {kGatewayTag, static_cast<std::uint64_t>(t)}));
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < in.size(); ++i) {
    double w = weights == GatewayWeights::kIdentity ? 1.0 : normal(rng);
    entries.emplace_back(static_cast<int>(i), in[i], w);
  }
  b.setFromTriplets(entries.begin(), entries.end());
  return b;
}

void check_time(const CoefficientSchedule& sched, int t, int lo) {
  if (t < lo || t > sched.final_time) {
    throw std::invalid_argument("time index " + std::to_string(t) + " outside [" +
                                std::to_string(lo) + ", " +
                                std::to_string(sched.final_time) + "]");
  }
}

Matrix omega_forward(const CoefficientSchedule& sched, int final_time, Eigen::Index rows,
                     Eigen::Index edges) {
  Matrix omega(rows, edges);
  Matrix product = Matrix::Identity(edges, edges);
  Eigen::Index row = 0;
  for (int t = 2; t <= final_time; ++t) {
    if (t >= 3) product = sched.F(t) * product;
    const SparseMatrix& b = sched.B(t);
    omega.middleRows(row, b.rows()) = b * product;
    row += b.rows();
  }
  return omega;
}

Matrix omega_backward(const CoefficientSchedule& sched, int final_time, Eigen::Index rows,
                      Eigen::Index edges) {
  Matrix omega(rows, edges);
  Eigen::Index row = 0;
  for (int t = 2; t <= final_time; ++t) {
    const SparseMatrix& b = sched.B(t);
    Matrix block = Matrix(b.transpose());
    for (int s = t; s >= 3; --s) block = sched.F(s).transpose() * block;
    omega.middleRows(row, b.rows()) = block.transpose();
    row += b.rows();
  }
  return omega;
}

}  // namespace

const SparseMatrix& CoefficientSchedule::F(int t) const {
  check_time(*this, t, 3);
  return mixing[t - 3];
}

const SparseMatrix& CoefficientSchedule::B(int t) const {
  check_time(*this, t, 2);
  return extraction[t - 2];
}

Matrix CoefficientSchedule::A(int t) const {
  check_time(*this, t, 2);
  if (t == 2) return alpha2;
  return Matrix::Zero(alpha2.rows(), alpha2.cols());
}

Matrix draw_alpha(const NetworkGraph& g, double sigma_alpha_sq, std::mt19937_64& rng) {
  if (!(sigma_alpha_sq > 0.0)) throw std::invalid_argument("alpha variance must be positive");
  const double sd = std::sqrt(sigma_alpha_sq);
  std::normal_distribution<double> normal;
  Matrix alpha = Matrix::Zero(g.edge_count(), g.node_count());
  for (const Edge& e : g.edges()) alpha(e.id, e.tail) = sd * normal(rng);
  return alpha;
}

Matrix draw_alpha(const NetworkGraph& g, double sigma_alpha_sq, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return draw_alpha(g, sigma_alpha_sq, rng);
}

CoefficientSchedule with_alpha(const CoefficientSchedule& sched, Matrix alpha2) {
  if (alpha2.rows() != sched.alpha2.rows() || alpha2.cols() != sched.alpha2.cols()) {
    throw std::invalid_argument("alpha2 dimension mismatch");
  }
  CoefficientSchedule out = sched;
  out.alpha2 = std::move(alpha2);
  return out;
}

CoefficientSchedule draw_coefficients(const NetworkGraph& g, int final_time,
                                      std::uint64_t seed,
                                      const CoefficientOptions& options) {
  if (final_time < 2) throw std::invalid_argument("final time must be at least 2");
  CoefficientSchedule sched;
  sched.final_time = final_time;
  sched.seed = seed;
  for (int t = 3; t <= final_time; ++t) {
    std::uint64_t key = options.beta_policy == BetaPolicy::kPerStep ? t : 0;
    sched.mixing.push_back(draw_mixing(g, seed, key));
  }
  for (int t = 2; t <= final_time; ++t) {
    sched.extraction.push_back(draw_extraction(g, seed, t, options.gateway_weights));
  }
  sched.sigma_alpha_sq =
      options.sigma_alpha_sq
          ? *options.sigma_alpha_sq
          : calibrate_alpha_variance(build_omega(sched, g, final_time), g.node_count());
  sched.alpha2 = draw_alpha(g, sched.sigma_alpha_sq, derive_seed(seed, {kAlphaTag}));
  return sched;
}

Matrix build_omega(const CoefficientSchedule& sched, const NetworkGraph& g, int final_time,
                   OmegaRoute route) {
  if (final_time < 2 || final_time > sched.final_time) {
    throw std::invalid_argument("final time outside the schedule");
  }
  const Eigen::Index edges = g.edge_count();
  Eigen::Index rows = 0;
  for (int t = 2; t <= final_time; ++t) rows += sched.B(t).rows();
  if (route == OmegaRoute::kAuto) {
    // Forward costs ~T |E| per nonzero of F, backward ~T^2 |In(v0)| / 2.
    const double r = static_cast<double>(rows) / (final_time - 1);
    route = static_cast<double>(edges) < 0.5 * (final_time - 2) * r
                ? OmegaRoute::kForwardProduct
                : OmegaRoute::kBackwardThin;
  }
  return route == OmegaRoute::kForwardProduct ? omega_forward(sched, final_time, rows, edges)
                                              : omega_backward(sched, final_time, rows, edges);
}

double calibrate_alpha_variance(const Matrix& omega, int node_count) {
  const double frob_sq = omega.squaredNorm();
  if (!(frob_sq > 0.0)) throw std::invalid_argument("omega is identically zero");
  if (node_count < 1) throw std::invalid_argument("node_count must be positive");
  return node_count / frob_sq;
}

QuantizerSpec QuantizerSpec::disabled() { return {}; }

QuantizerSpec QuantizerSpec::from_capacities(const NetworkGraph& g, double block_length,
                                             double q_max) {
  if (!(block_length > 0.0)) throw std::invalid_argument("block length must be positive");
  QuantizerSpec q;
  q.mode = QuantizerMode::kUniform;
  q.q_max = q_max;
  for (const Edge& e : g.edges()) q.rate_bits.push_back(block_length * e.capacity_bits);
  if (!(q_max > 0.0)) throw std::invalid_argument("q_max must be positive");
  return q;
}

QuantizerSpec QuantizerSpec::uniform_bits(int edge_count, double bits, double q_max) {
  if (!(bits > 0.0)) throw std::invalid_argument("quantizer rate must be positive");
  if (!(q_max > 0.0)) throw std::invalid_argument("q_max must be positive");
  QuantizerSpec q;
  q.mode = QuantizerMode::kUniform;
  q.q_max = q_max;
  q.rate_bits.assign(edge_count, bits);
  return q;
}

double QuantizerSpec::levels(EdgeId e) const {
  return std::ldexp(1.0, static_cast<int>(std::ceil(rate_bits.at(e))));
}

double QuantizerSpec::step(EdgeId e) const { return 2.0 * q_max / levels(e); }

QuantizedValue quantize_uniform(double input, double levels, double q_max) {
  if (!(levels >= 2.0)) throw std::invalid_argument("quantizer needs at least 2 levels");
  const double delta = 2.0 * q_max / levels;
  double index = std::floor((input + q_max) / delta);
  index = std::clamp(index, 0.0, levels - 1.0);
  return {-q_max + (index + 0.5) * delta, std::abs(input) > q_max};
}

NetworkState initial_state(const NetworkGraph& g) {
  NetworkState s;
  s.t = 1;
  s.y = Vector::Zero(g.edge_count());
  return s;
}

NetworkState step(const NetworkState& state, const CoefficientSchedule& sched,
                  const NetworkGraph& g, const QuantizerSpec& quant, const Vector& x) {
  const int edges = g.edge_count();
  if (state.t < 1) throw std::invalid_argument("state time must be at least 1");
  if (state.y.size() != edges) throw std::invalid_argument("edge content dimension mismatch");
  if (x.size() != g.node_count()) throw std::invalid_argument("message dimension mismatch");
  if (sched.alpha2.rows() != edges || sched.alpha2.cols() != g.node_count()) {
    throw std::invalid_argument("schedule does not match graph");
  }
  if (quant.mode == QuantizerMode::kUniform &&
      static_cast<int>(quant.rate_bits.size()) != edges) {
    throw std::invalid_argument("quantizer rate count does not match edge count");
  }
  if (state.t == 1 && !state.y.isZero(0.0)) {
    throw std::invalid_argument("initial rest violated: y(1) must be zero");
  }

  const int t = state.t + 1;
  Vector u = t == 2 ? Vector(sched.alpha2 * x) : Vector(sched.F(t) * state.y);

  NetworkState next;
  next.t = t;
  next.noise_log = state.noise_log;
  next.saturations = state.saturations;
  next.y.resize(edges);
  Vector noise = Vector::Zero(edges);
  if (quant.mode == QuantizerMode::kDisabled) {
    next.y = u;
  } else {
    for (int e = 0; e < edges; ++e) {
      QuantizedValue q = quantize_uniform(u(e), quant.levels(e), quant.q_max);
      next.y(e) = q.value;
      noise(e) = q.value - u(e);
      next.saturations += q.saturated;
    }
  }
  next.noise_log.push_back(std::move(noise));
  return next;
}

MeasurementSystem measurement_system(const CoefficientSchedule& sched, const NetworkGraph& g,
                                     int final_time) {
  MeasurementSystem sys;
  sys.final_time = final_time;
  sys.sigma_alpha_sq = sched.sigma_alpha_sq;
  sys.omega = build_omega(sched, g, final_time);
  sys.alpha2 = sched.alpha2;
  sys.psi_tot = sys.omega * sys.alpha2;
  return sys;
}

QncRun run_qnc(const NetworkGraph& g, const CoefficientSchedule& sched,
               const QuantizerSpec& quant, const Vector& x, int final_time) {
  if (final_time < 2 || final_time > sched.final_time) {
    throw std::invalid_argument("final time outside the schedule");
  }
  QncRun run;
  run.system = measurement_system(sched, g, final_time);
  run.z_tot.resize(run.system.m());

  NetworkState state = initial_state(g);
  Eigen::Index row = 0;
  for (int t = 2; t <= final_time; ++t) {
    state = step(state, sched, g, quant, x);
    const SparseMatrix& b = sched.B(t);
    run.z_tot.segment(row, b.rows()) = b * state.y;
    row += b.rows();
  }
  run.noise_effect = run.z_tot - run.system.psi_tot * x;
  run.state = std::move(state);
  return run;
}

double estimate_dynamic_range(const NetworkGraph& g, const CoefficientSchedule& sched,
                              const Vector& x, int final_time, double multiple) {
  NetworkState state = initial_state(g);
  const QuantizerSpec off = QuantizerSpec::disabled();
  double sum = 0.0, sum_sq = 0.0;
  long count = 0;
  for (int t = 2; t <= final_time; ++t) {
    state = step(state, sched, g, off, x);
    sum += state.y.sum();
    sum_sq += state.y.squaredNorm();
    count += state.y.size();
  }
  if (count == 0) return 1.0;
  const double mean = sum / count;
  const double var = std::max(0.0, sum_sq / count - mean * mean);
  const double range = multiple * std::sqrt(var);
  return range > 0.0 ? range : 1.0;
}

void save_measurement_system(std::ostream& os, const MeasurementSystem& sys) {
  os << "qnc-measurement-system 1\n"
     << "final_time " << sys.final_time << '\n'
     << "sigma_alpha_sq " << text_io::format_double(sys.sigma_alpha_sq) << '\n';
  text_io::write_matrix(os, "omega", sys.omega);
  text_io::write_matrix(os, "alpha2", sys.alpha2);
  text_io::write_matrix(os, "psi_tot", sys.psi_tot);
}

MeasurementSystem load_measurement_system(std::istream& is) {
  text_io::expect_token(is, "qnc-measurement-system");
  int version = 0;
  if (!(is >> version) || version != 1) {
    throw std::invalid_argument("unsupported measurement system version");
  }
  MeasurementSystem sys;
  sys.final_time = static_cast<int>(text_io::read_scalar(is, "final_time"));
  sys.sigma_alpha_sq = text_io::read_scalar(is, "sigma_alpha_sq");
  sys.omega = text_io::read_matrix(is, "omega");
  sys.alpha2 = text_io::read_matrix(is, "alpha2");
  sys.psi_tot = text_io::read_matrix(is, "psi_tot");
  if (sys.omega.cols() != sys.alpha2.rows() || sys.psi_tot.rows() != sys.omega.rows() ||
      sys.psi_tot.cols() != sys.alpha2.cols()) {
    throw std::invalid_argument("inconsistent measurement system dimensions");
  }
  return sys;
}

}  // namespace qnc
