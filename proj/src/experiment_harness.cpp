#include "qnc/experiment_harness.hpp"

#include "qnc/text_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace qnc {

namespace {

using text_io::format_double;

// Seed tags; keep stable, outputs depend on them.
constexpr std::uint64_t kGraphTag = 1;
constexpr std::uint64_t kCoefficientTag = 2;
constexpr std::uint64_t kSearchTag = 3;
constexpr std::uint64_t kMatchedSearchTag = 4;

using RecordKey = std::tuple<int, double, int, int>;  // edges, delta, m_requested, deployment

RecordKey key_of(const SweepRecord& r) {
  return {r.edges, r.delta_k, r.m_requested, r.deployment};
}

std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

struct Deployment {
  NetworkGraph graph;
  int in_degree = 0;  // |In(v0)|
};

Deployment make_deployment(const SweepConfig& cfg, int edges, int dep) {
  DeploymentConfig dc;
  dc.node_count = cfg.node_count;
  dc.edge_count = edges;
  dc.capacity.constant_bits = cfg.capacity_bits;
  dc.seed = derive_seed(cfg.seed, {kGraphTag, static_cast<std::uint64_t>(edges),
                                   static_cast<std::uint64_t>(dep)});
  NetworkGraph g = generate_deployment(dc);
  const int r = static_cast<int>(g.incoming_edges(g.gateway()).size());
  return {std::move(g), r};
}

int stop_time_for(int m_requested, int in_degree) {
  return 1 + (m_requested + in_degree - 1) / in_degree;
}

// Ω for every stop time up to t_max; Ω(T) is the leading (T-1)r rows.
Matrix omega_up_to(const SweepConfig& cfg, const Deployment& d, int edges, int dep, int t_max) {
  CoefficientOptions opts;
  opts.sigma_alpha_sq = 1.0;  // recalibrated per stop time
  const CoefficientSchedule sched =
      draw_coefficients(d.graph, t_max,
                        derive_seed(cfg.seed, {kCoefficientTag, static_cast<std::uint64_t>(edges),
                                               static_cast<std::uint64_t>(dep)}),
                        opts);
  return build_omega(sched, d.graph, t_max);
}

double qnc_tail(const SweepConfig& cfg, const Deployment& d, const Matrix& omega_full, int t,
                TailQuery q, std::uint64_t search_seed) {
  const Eigen::Index rows = static_cast<Eigen::Index>(t - 1) * d.in_degree;
  const Matrix omega = omega_full.topRows(rows);
  SearchBudget budget = cfg.budget;
  budget.seed = search_seed;
  budget.workers = 1;  // parallelism lives at the task level
  return worst_case_tail(omega, d.graph, calibrate_alpha_variance(omega, cfg.node_count), q,
                         budget)
      .p_tail;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream is(trim(text));
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) {
    throw std::invalid_argument("bad value for '" + key + "': '" + text + "'");
  }
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_value<T>(key, item));
  return out;
}

double geometric_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double p : v) {
    if (p <= 0.0) return 0.0;
    s += std::log(p);
  }
  return std::exp(s / static_cast<double>(v.size()));
}

double arithmetic_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double p : v) s += p;
  return s / static_cast<double>(v.size());
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(os);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<SweepRecord> in_grid_order(const SweepConfig& cfg,
                                       const std::map<RecordKey, SweepRecord>& done) {
  std::vector<SweepRecord> out;
  for (int edges : cfg.edge_counts) {
    for (double delta : cfg.deltas) {
      for (int m : cfg.measurements) {
        for (int dep = 0; dep < cfg.deployments; ++dep) {
          auto it = done.find({edges, delta, m, dep});
          if (it != done.end()) out.push_back(it->second);
        }
      }
    }
  }
  return out;
}

void write_sweep_outputs(const SweepConfig& cfg, std::span<const SweepRecord> records) {
  write_file(cfg.output, [&](std::ostream& os) { write_sweep_records(os, records); });
  const auto summary = summarize_sweep(records);
  write_file(cfg.output + ".summary.csv",
             [&](std::ostream& os) { write_sweep_summary(os, summary); });
  write_file(cfg.output + ".timing.csv", [&](std::ostream& os) {
    os << "deployment,edges,delta_k,m_requested,wall_seconds\n";
    for (const SweepRecord& r : records) {
      os << r.deployment << ',' << r.edges << ',' << format_double(r.delta_k) << ','
         << r.m_requested << ',' << format_double(r.wall_seconds) << '\n';
    }
  });
}

}  // namespace

void SweepConfig::validate() const {
  if (node_count < 2) throw std::invalid_argument("node_count must be at least 2");
  if (edge_counts.empty() || deltas.empty() || measurements.empty() || targets.empty()) {
    throw std::invalid_argument("sweep lists must be nonempty");
  }
  for (int e : edge_counts) {
    if (e < 1) throw std::invalid_argument("edge counts must be positive");
  }
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("delta_k must lie in (0, 1)");
  }
  for (int m : measurements) {
    if (m < 1) throw std::invalid_argument("measurement counts must be positive");
  }
  for (double t : targets) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("targets must lie in (0, 1)");
  }
  if (deployments < 1) throw std::invalid_argument("deployments must be positive");
  if (!(capacity_bits > 0.0)) throw std::invalid_argument("capacity_bits must be positive");
  if (workers < 0) throw std::invalid_argument("workers must be nonnegative");
  if (!(max_measurement_ratio >= 1.0)) {
    throw std::invalid_argument("max_measurement_ratio must be at least 1");
  }
  if (budget.random_starts < 0 || budget.refine_starts < 0 || budget.max_sweeps < 0 ||
      !(budget.initial_step > 0.0) || !(budget.min_step > 0.0)) {
    throw std::invalid_argument("search budget must be positive");
  }
}

SweepConfig load_sweep_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  SweepConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section != "sweep") throw std::invalid_argument("unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      if (key == "n" || key == "node_count") cfg.node_count = parse_value<int>(key, v);
      else if (key == "edges") cfg.edge_counts = parse_list<int>(key, v);
      else if (key == "deltas") cfg.deltas = parse_list<double>(key, v);
      else if (key == "measurements") cfg.measurements = parse_list<int>(key, v);
      else if (key == "deployments") cfg.deployments = parse_value<int>(key, v);
      else if (key == "capacity_bits") cfg.capacity_bits = parse_value<double>(key, v);
      else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, v);
      else if (key == "workers") cfg.workers = parse_value<int>(key, v);
      else if (key == "targets") cfg.targets = parse_list<double>(key, v);
      else if (key == "max_measurement_ratio") cfg.max_measurement_ratio = parse_value<double>(key, v);
      else if (key == "output") cfg.output = trim(v);
      else if (key == "random_starts") cfg.budget.random_starts = parse_value<int>(key, v);
      else if (key == "refine_starts") cfg.budget.refine_starts = parse_value<int>(key, v);
      else if (key == "max_sweeps") cfg.budget.max_sweeps = parse_value<int>(key, v);
      else if (key == "initial_step") cfg.budget.initial_step = parse_value<double>(key, v);
      else if (key == "min_step") cfg.budget.min_step = parse_value<double>(key, v);
      else throw std::invalid_argument("unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  cfg.validate();

  std::map<RecordKey, SweepRecord> done;
  if (!cfg.output.empty()) {
    std::ifstream in(cfg.output);
    if (in) {
      for (const SweepRecord& r : read_sweep_records(in)) done[key_of(r)] = r;
    }
  }

  struct Task {
    int edges;
    int dep;
  };
  std::vector<Task> tasks;
  for (int edges : cfg.edge_counts) {
    for (int dep = 0; dep < cfg.deployments; ++dep) tasks.push_back({edges, dep});
  }

  std::mutex mu;
  std::exception_ptr failure;
  try {
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
      const auto [edges, dep] = tasks[i];
      std::vector<std::pair<double, int>> todo;
      {
        std::lock_guard lock(mu);
        for (double delta : cfg.deltas) {
          for (int m : cfg.measurements) {
            if (!done.count({edges, delta, m, dep})) todo.emplace_back(delta, m);
          }
        }
      }
      if (todo.empty()) return;

      const Deployment d = make_deployment(cfg, edges, dep);
      int t_max = 2;
      for (const auto& [delta, m] : todo) t_max = std::max(t_max, stop_time_for(m, d.in_degree));
      const Matrix omega_full = omega_up_to(cfg, d, edges, dep, t_max);

      for (const auto& [delta, m] : todo) {
        const auto start = std::chrono::steady_clock::now();
        const TailQuery q(rip_epsilon(delta));
        SweepRecord r;
        r.deployment = dep;
        r.edges = edges;
        r.delta_k = delta;
        r.m_requested = m;
        r.final_time = stop_time_for(m, d.in_degree);
        r.m = (r.final_time - 1) * d.in_degree;
        r.p_tail_qnc = qnc_tail(cfg, d, omega_full, r.final_time, q,
                                derive_seed(cfg.seed, {kSearchTag, static_cast<std::uint64_t>(edges),
                                                       static_cast<std::uint64_t>(dep),
                                                       bits_of(delta),
                                                       static_cast<std::uint64_t>(m)}));
        r.p_tail_gauss = tail_probability_gaussian(r.m, q);
        r.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::lock_guard lock(mu);
        done[key_of(r)] = r;
      }
    });
  } catch (...) {
    failure = std::current_exception();
  }

  std::vector<SweepRecord> records = in_grid_order(cfg, done);
  if (!cfg.output.empty()) write_sweep_outputs(cfg, records);
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<SweepSummary> summarize_sweep(std::span<const SweepRecord> records) {
  // Group in first-appearance order.
  std::vector<std::tuple<int, double, int>> order;
  std::map<std::tuple<int, double, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const SweepRecord& r : records) {
    const auto key = std::make_tuple(r.edges, r.delta_k, r.m_requested);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.first.push_back(r.p_tail_qnc);
    it->second.second.push_back(r.p_tail_gauss);
  }
  std::vector<SweepSummary> out;
  for (const auto& key : order) {
    const auto& [qnc, gauss] = groups.at(key);
    SweepSummary s;
    std::tie(s.edges, s.delta_k, s.m_requested) = key;
    s.count = static_cast<int>(qnc.size());
    s.geo_mean_qnc = geometric_mean(qnc);
    s.mean_qnc = arithmetic_mean(qnc);
    s.geo_mean_gauss = geometric_mean(gauss);
    s.mean_gauss = arithmetic_mean(gauss);
    out.push_back(s);
  }
  return out;
}

int min_gaussian_measurements(TailQuery q, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target must lie in (0, 1)");
  auto ok = [&](int m) { return tail_probability_gaussian(m, q) <= target; };
  if (ok(1)) return 1;
  int lo = 1, hi = 2;
  while (!ok(hi)) {
    lo = hi;
    if (hi > (1 << 28)) throw NumericalError("gaussian measurement search diverged");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<MatchedRecord> run_matched_sweep(const SweepConfig& cfg) {
  cfg.validate();

  std::map<std::pair<double, double>, int> m_gauss;
  for (double delta : cfg.deltas) {
    for (double target : cfg.targets) {
      m_gauss[{delta, target}] = min_gaussian_measurements(TailQuery(rip_epsilon(delta)), target);
    }
  }

  struct Task {
    int edges;
    int dep;
  };
  std::vector<Task> tasks;
  for (int edges : cfg.edge_counts) {
    for (int dep = 0; dep < cfg.deployments; ++dep) tasks.push_back({edges, dep});
  }
  std::vector<std::vector<MatchedRecord>> per_task(tasks.size());

  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    const auto [edges, dep] = tasks[i];
    const Deployment d = make_deployment(cfg, edges, dep);
    auto cap_time = [&](int mg) {
      const int m_cap = static_cast<int>(std::ceil(cfg.max_measurement_ratio * mg));
      return stop_time_for(std::max(m_cap, 1), d.in_degree);
    };
    int t_max = 2;
    for (const auto& [key, mg] : m_gauss) t_max = std::max(t_max, cap_time(mg));
    const Matrix omega_full = omega_up_to(cfg, d, edges, dep, t_max);

    for (double delta : cfg.deltas) {
      const TailQuery q(rip_epsilon(delta));
      std::map<int, double> memo;
      auto tail_at = [&](int t) {
        auto it = memo.find(t);
        if (it != memo.end()) return it->second;
        const double p = qnc_tail(
            cfg, d, omega_full, t, q,
            derive_seed(cfg.seed, {kMatchedSearchTag, static_cast<std::uint64_t>(edges),
                                   static_cast<std::uint64_t>(dep), bits_of(delta),
                                   static_cast<std::uint64_t>(t)}));
        memo[t] = p;
        return p;
      };
      for (double target : cfg.targets) {
        MatchedRecord r;
        r.deployment = dep;
        r.edges = edges;
        r.delta_k = delta;
        r.target = target;
        r.m_gauss = m_gauss.at({delta, target});
        const int t_cap = cap_time(r.m_gauss);
        if (tail_at(t_cap) <= target) {
          int lo = 1, hi = t_cap;  // tail_at(lo) treated as failing; T = 1 has no measurements
          while (hi - lo > 1) {
            const int mid = lo + (hi - lo) / 2;
            (tail_at(mid) <= target ? hi : lo) = mid;
          }
          r.m_qnc = (hi - 1) * d.in_degree;
        }
        per_task[i].push_back(r);
      }
    }
  });

  std::vector<MatchedRecord> records;
  for (int edges : cfg.edge_counts) {
    for (double delta : cfg.deltas) {
      for (double target : cfg.targets) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          if (tasks[i].edges != edges) continue;
          for (const MatchedRecord& r : per_task[i]) {
            if (r.delta_k == delta && r.target == target) records.push_back(r);
          }
        }
      }
    }
  }

  if (!cfg.output.empty()) {
    write_file(cfg.output + ".matched.csv",
               [&](std::ostream& os) { write_matched_records(os, records); });
    const auto summary = summarize_matched(records);
    write_file(cfg.output + ".matched_summary.csv",
               [&](std::ostream& os) { write_matched_summary(os, summary); });
  }
  return records;
}

std::vector<MatchedSummary> summarize_matched(std::span<const MatchedRecord> records) {
  std::vector<std::tuple<int, double, double>> order;
  std::map<std::tuple<int, double, double>, std::vector<const MatchedRecord*>> groups;
  for (const MatchedRecord& r : records) {
    const auto key = std::make_tuple(r.edges, r.delta_k, r.target);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<MatchedSummary> out;
  for (const auto& key : order) {
    const auto& group = groups.at(key);
    MatchedSummary s;
    std::tie(s.edges, s.delta_k, s.target) = key;
    s.deployments = static_cast<int>(group.size());
    s.m_gauss = group.front()->m_gauss;
    double log_sum = 0.0;
    for (const MatchedRecord* r : group) {
      if (r->m_qnc) {
        log_sum += std::log(static_cast<double>(*r->m_qnc));
      } else {
        ++s.unreached;
      }
    }
    if (s.unreached > 0) {
      s.geo_mean_m_qnc = std::numeric_limits<double>::infinity();
      s.log10_ratio = std::numeric_limits<double>::infinity();
    } else {
      s.geo_mean_m_qnc = std::exp(log_sum / s.deployments);
      s.log10_ratio = std::log10(s.geo_mean_m_qnc) - std::log10(static_cast<double>(s.m_gauss));
    }
    out.push_back(s);
  }
  return out;
}

EndToEndRecord run_end_to_end(const EndToEndConfig& cfg) {
  if (cfg.final_time < 2) throw std::invalid_argument("final_time must be at least 2");
  if (cfg.sparsity < 0 || cfg.sparsity > cfg.node_count) {
    throw std::invalid_argument("sparsity must satisfy 0 <= k <= n");
  }

  DeploymentConfig dc;
  dc.node_count = cfg.node_count;
  dc.edge_count = cfg.edge_count;
  dc.capacity.constant_bits = cfg.capacity_bits;
  dc.seed = derive_seed(cfg.seed, {kGraphTag});
  const NetworkGraph g = generate_deployment(dc);
  const CoefficientSchedule sched =
      draw_coefficients(g, cfg.final_time, derive_seed(cfg.seed, {kCoefficientTag}));

  const SparseSignal sig =
      generate_sparse_message(cfg.node_count, cfg.sparsity, cfg.law, derive_seed(cfg.seed, {5}));
  const SparsifyingBasis basis = cfg.random_basis
                                     ? random_orthonormal_basis(cfg.node_count,
                                                                derive_seed(cfg.seed, {6}))
                                     : SparsifyingBasis::identity(cfg.node_count);
  const Vector x = basis.phi * sig.s;

  QuantizerSpec quant = QuantizerSpec::disabled();
  if (cfg.quantizer_bits > 0.0) {
    const double q_max = estimate_dynamic_range(g, sched, x, cfg.final_time, cfg.range_multiple);
    quant = QuantizerSpec::uniform_bits(g.edge_count(), cfg.quantizer_bits, q_max);
  }
  const QncRun run = run_qnc(g, sched, quant, x, cfg.final_time);

  RecoveryProblem problem;
  problem.z = run.z_tot;
  problem.theta = run.system.psi_tot * basis.phi;
  problem.noise_radius = run.noise_effect.norm();
  problem.truth = sig.s;
  const DecodeResult dec = l1_min_decode(problem, cfg.decoder);

  EndToEndRecord rec;
  rec.m = run.system.m();
  rec.noise_radius = problem.noise_radius;
  rec.saturations = run.state.saturations;
  rec.residual_norm = dec.residual_norm;
  rec.l1_norm = dec.l1_norm;
  rec.certified = dec.certified;
  rec.metrics = recovery_report(dec.s, sig.s, basis.phi);
  return rec;
}

std::vector<RipReportRow> rip_report(std::span<const SweepRecord> records, int n,
                                     std::span<const int> ks) {
  std::vector<RipReportRow> rows;
  for (const SweepRecord& r : records) {
    for (int k : ks) {
      rows.push_back({r.deployment, r.edges, r.m, rip_bound(r.p_tail_qnc, n, k, r.delta_k)});
    }
  }
  return rows;
}

void write_sweep_records(std::ostream& os, std::span<const SweepRecord> records) {
  os << "deployment,edges,delta_k,m_requested,m,final_time,p_tail_qnc,p_tail_gauss\n";
  for (const SweepRecord& r : records) {
    os << r.deployment << ',' << r.edges << ',' << format_double(r.delta_k) << ','
       << r.m_requested << ',' << r.m << ',' << r.final_time << ','
       << format_double(r.p_tail_qnc) << ',' << format_double(r.p_tail_gauss) << '\n';
  }
}

std::vector<SweepRecord> read_sweep_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) return {};
  if (trim(line) != "deployment,edges,delta_k,m_requested,m,final_time,p_tail_qnc,p_tail_gauss") {
    throw std::invalid_argument("unexpected sweep record header");
  }
  std::vector<SweepRecord> out;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 8) throw std::invalid_argument("malformed sweep record: " + line);
    SweepRecord r;
    r.deployment = parse_value<int>("deployment", f[0]);
    r.edges = parse_value<int>("edges", f[1]);
    r.delta_k = parse_value<double>("delta_k", f[2]);
    r.m_requested = parse_value<int>("m_requested", f[3]);
    r.m = parse_value<int>("m", f[4]);
    r.final_time = parse_value<int>("final_time", f[5]);
    r.p_tail_qnc = parse_value<double>("p_tail_qnc", f[6]);
    r.p_tail_gauss = parse_value<double>("p_tail_gauss", f[7]);
    out.push_back(r);
  }
  return out;
}

void write_sweep_summary(std::ostream& os, std::span<const SweepSummary> rows) {
  os << "edges,delta_k,m_requested,count,geo_mean_qnc,mean_qnc,geo_mean_gauss,mean_gauss\n";
  for (const SweepSummary& s : rows) {
    os << s.edges << ',' << format_double(s.delta_k) << ',' << s.m_requested << ',' << s.count
       << ',' << format_double(s.geo_mean_qnc) << ',' << format_double(s.mean_qnc) << ','
       << format_double(s.geo_mean_gauss) << ',' << format_double(s.mean_gauss) << '\n';
  }
}

void write_matched_records(std::ostream& os, std::span<const MatchedRecord> records) {
  os << "deployment,edges,delta_k,target,m_qnc,m_gauss\n";
  for (const MatchedRecord& r : records) {
    os << r.deployment << ',' << r.edges << ',' << format_double(r.delta_k) << ','
       << format_double(r.target) << ',';
    if (r.m_qnc) {
      os << *r.m_qnc;
    } else {
      os << "unreached";
    }
    os << ',' << r.m_gauss << '\n';
  }
}

void write_matched_summary(std::ostream& os, std::span<const MatchedSummary> rows) {
  os << "edges,delta_k,target,deployments,unreached,geo_mean_m_qnc,m_gauss,log10_ratio\n";
  for (const MatchedSummary& s : rows) {
    os << s.edges << ',' << format_double(s.delta_k) << ',' << format_double(s.target) << ','
       << s.deployments << ',' << s.unreached << ',' << format_double(s.geo_mean_m_qnc) << ','
       << s.m_gauss << ',' << format_double(s.log10_ratio) << '\n';
  }
}

void write_rip_report(std::ostream& os, std::span<const RipReportRow> rows) {
  os << "deployment,edges,m,n,k,delta_k,p_tail,p_rip,vacuous\n";
  for (const RipReportRow& r : rows) {
    os << r.deployment << ',' << r.edges << ',' << r.m << ',' << r.bound.n << ',' << r.bound.k
       << ',' << format_double(r.bound.delta_k) << ',' << format_double(r.bound.p_tail) << ','
       << format_double(r.bound.p_rip) << ',' << (r.bound.vacuous ? 1 : 0) << '\n';
  }
}

}  // namespace qnc
