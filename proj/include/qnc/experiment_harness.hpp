#pragma once

#include "qnc/common.hpp"
#include "qnc/network_model.hpp"
#include "qnc/qnc_engine.hpp"
#include "qnc/rip_analyzer.hpp"
#include "qnc/sparse_recovery.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qnc {

// Grid for the tail-probability comparison between QNC and Gaussian
// measurement matrices.
struct SweepConfig {
  int node_count = 100;
  std::vector<int> edge_counts{1100, 1400, 1800};
  std::vector<double> deltas{0.41421};
  std::vector<int> measurements{20, 40, 80, 160};  // requested m per grid point
  int deployments = 64;
  double capacity_bits = 1.0;
  SearchBudget budget;
  std::uint64_t seed = 1;
  int workers = 1;
  // Matched-measurement analysis.
  std::vector<double> targets{1e-1, 1e-2, 1e-3};
  double max_measurement_ratio = 10.0;
  // Output base path; empty writes nothing.
  std::string output;

  // Throws std::invalid_argument on empty lists, deltas outside (0, 1), or
  // nonpositive counts.
  void validate() const;
};

// Parses `key = value` lines under a [sweep] section. Lists are comma
// separated. Unknown keys are rejected.
SweepConfig load_sweep_config(std::istream& is);

struct SweepRecord {
  int deployment = 0;
  int edges = 0;
  double delta_k = 0.0;
  int m_requested = 0;
  int m = 0;  // (T - 1) |In(v0)|, the first multiple of |In(v0)| >= m_requested
  int final_time = 2;
  double p_tail_qnc = 0.0;
  double p_tail_gauss = 0.0;
  double wall_seconds = 0.0;
};

struct SweepSummary {
  int edges = 0;
  double delta_k = 0.0;
  int m_requested = 0;
  int count = 0;
  double geo_mean_qnc = 0.0;
  double mean_qnc = 0.0;
  double geo_mean_gauss = 0.0;
  double mean_gauss = 0.0;
};

// For every (|E|, δ_k, m, deployment): draw the deployment and coefficients,
// compute the worst-case QNC tail at ε = δ_k/√2 and the Gaussian tail at the
// same m. Deployments and coefficients depend only on (seed, |E|,
// deployment), so curves over m and δ_k share networks.
//
// With a non-empty `output`, writes <output> (records), <output>.summary.csv
// and <output>.timing.csv. Records already present in <output> are reused,
// not recomputed. On failure, completed records are written before the
// exception propagates.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

std::vector<SweepSummary> summarize_sweep(std::span<const SweepRecord> records);

struct MatchedRecord {
  int deployment = 0;
  int edges = 0;
  double delta_k = 0.0;
  double target = 0.0;
  std::optional<int> m_qnc;  // empty: target not reached within the ratio cap
  int m_gauss = 0;
};

struct MatchedSummary {
  int edges = 0;
  double delta_k = 0.0;
  double target = 0.0;
  int deployments = 0;
  int unreached = 0;
  double geo_mean_m_qnc = 0.0;  // +inf when any deployment is unreached
  int m_gauss = 0;
  double log10_ratio = 0.0;     // log10(geo_mean_m_qnc / m_gauss)
};

// Smallest m with tail_probability_gaussian(m, ε) <= target.
int min_gaussian_measurements(TailQuery q, double target);

// Minimum measurements reaching each target p_tail, by bisection over the
// stop time for QNC and over m for the Gaussian ensemble. The QNC search is
// capped at max_measurement_ratio times the Gaussian requirement; a tail
// above target at the cap is certified (the search value is a lower bound).
// With a non-empty `output`, writes <output>.matched.csv and
// <output>.matched_summary.csv.
std::vector<MatchedRecord> run_matched_sweep(const SweepConfig& cfg);

std::vector<MatchedSummary> summarize_matched(std::span<const MatchedRecord> records);

struct EndToEndConfig {
  int node_count = 100;
  int edge_count = 1400;
  int sparsity = 5;
  int final_time = 6;
  double quantizer_bits = 6.0;  // <= 0 disables quantization
  // q_max = range_multiple * std of edge contents in a dry run.
  double range_multiple = 4.0;
  NonzeroLaw law = NonzeroLaw::kGaussian;
  bool random_basis = false;
  double capacity_bits = 1.0;
  std::uint64_t seed = 1;
  DecoderOptions decoder;
};

struct EndToEndRecord {
  int m = 0;
  double noise_radius = 0.0;
  long saturations = 0;
  double residual_norm = 0.0;
  double l1_norm = 0.0;
  bool certified = false;
  RecoveryMetrics metrics;
};

// deployment -> coefficients -> sparse message -> QNC simulation ->
// ε_n = ‖n_eff,tot‖ -> ℓ1 decode -> report.
EndToEndRecord run_end_to_end(const EndToEndConfig& cfg);

struct RipReportRow {
  int deployment = 0;
  int edges = 0;
  int m = 0;
  RipBound bound;
};

// rip_lower_bound for every record and every k.
std::vector<RipReportRow> rip_report(std::span<const SweepRecord> records, int n,
                                     std::span<const int> ks);

void write_sweep_records(std::ostream& os, std::span<const SweepRecord> records);
std::vector<SweepRecord> read_sweep_records(std::istream& is);
void write_sweep_summary(std::ostream& os, std::span<const SweepSummary> rows);
void write_matched_records(std::ostream& os, std::span<const MatchedRecord> records);
void write_matched_summary(std::ostream& os, std::span<const MatchedSummary> rows);
void write_rip_report(std::ostream& os, std::span<const RipReportRow> rows);

}  // namespace qnc
