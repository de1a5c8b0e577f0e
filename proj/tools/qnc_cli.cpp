// qnc: command line front end.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.

#include "qnc/experiment_harness.hpp"
#include "qnc/text_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qnc;
using text_io::format_double;

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open '" + path + "'");
  return is;
}

// Writes to `path`, or stdout when empty.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot open '" + path + "' for writing");
  fn(os);
}

struct DeployArgs {
  int nodes = 100;
  int edges = 1400;
  double capacity = 1.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct SimulateArgs {
  std::string graph;
  int final_time = 6;
  std::uint64_t seed = 1;
  double bits = 6.0;
  int sparsity = 5;
  std::uint64_t message_seed = 2;
  std::string system_out;
  std::string problem_out;
};

struct TailArgs {
  std::string graph;
  int final_time = 6;
  std::uint64_t seed = 1;
  double delta = 0.41421;
  double epsilon = 0.0;
  std::vector<double> lambdas;
  int gaussian_m = 0;
  SearchBudget budget;
  int workers = 1;
};

struct SweepArgs {
  std::string config;
  std::string output;
  int workers = -1;
  bool matched = false;
};

struct RipArgs {
  double p_tail = -1.0;
  int n = 100;
  std::vector<int> ks{1, 2, 3, 4, 5};
  double delta = 0.41421;
  std::string records;
  std::string out;
};

struct RecoverArgs {
  std::string problem;
  std::string out;
  double tolerance = 1e-9;
  long max_iterations = 100000;
  bool end_to_end = false;
  EndToEndConfig e2e;
  bool gaussian_law = true;
};

void run_deploy(const DeployArgs& a) {
  DeploymentConfig dc;
  dc.node_count = a.nodes;
  dc.edge_count = a.edges;
  dc.capacity.constant_bits = a.capacity;
  dc.seed = a.seed;
  const NetworkGraph g = generate_deployment(dc);
  emit(a.out, [&](std::ostream& os) { save_graph(os, g); });
}

void run_simulate(const SimulateArgs& a) {
  auto gs = open_in(a.graph);
  const NetworkGraph g = load_graph(gs);
  const CoefficientSchedule sched = draw_coefficients(g, a.final_time, a.seed);
  const SparseSignal sig =
      generate_sparse_message(g.node_count(), a.sparsity, NonzeroLaw::kGaussian, a.message_seed);
  QuantizerSpec quant = QuantizerSpec::disabled();
  if (a.bits > 0.0) {
    quant = QuantizerSpec::uniform_bits(
        g.edge_count(), a.bits, estimate_dynamic_range(g, sched, sig.s, a.final_time));
  }
  const QncRun run = run_qnc(g, sched, quant, sig.s, a.final_time);
  if (!a.system_out.empty()) {
    emit(a.system_out, [&](std::ostream& os) { save_measurement_system(os, run.system); });
  }
  RecoveryProblem p{run.z_tot, run.system.psi_tot, run.noise_effect.norm(), sig.s};
  if (!a.problem_out.empty()) emit(a.problem_out, [&](std::ostream& os) { save_problem(os, p); });
  std::cout << "m " << run.system.m() << "\nnoise_radius " << format_double(p.noise_radius)
            << "\nsaturations " << run.state.saturations << '\n';
}

void run_tail(const TailArgs& a) {
  const TailQuery q(a.epsilon > 0.0 ? a.epsilon : rip_epsilon(a.delta));
  if (!a.lambdas.empty()) {
    std::cout << "p_tail " << format_double(tail_probability_weighted_chisq({a.lambdas}, q))
              << '\n';
    return;
  }
  if (a.gaussian_m > 0) {
    std::cout << "p_tail_gauss " << format_double(tail_probability_gaussian(a.gaussian_m, q))
              << '\n';
    return;
  }
  if (a.graph.empty()) throw std::invalid_argument("tail needs --graph, --lambdas or --gaussian-m");
  auto gs = open_in(a.graph);
  const NetworkGraph g = load_graph(gs);
  CoefficientOptions opts;
  const CoefficientSchedule sched = draw_coefficients(g, a.final_time, a.seed, opts);
  const Matrix omega = build_omega(sched, g, a.final_time);
  SearchBudget budget = a.budget;
  budget.workers = a.workers;
  const WorstCaseResult wc = worst_case_tail(omega, g, sched.sigma_alpha_sq, q, budget);
  const int m = static_cast<int>(omega.rows());
  std::cout << "m " << m << "\nepsilon " << format_double(q.epsilon) << "\np_tail_qnc "
            << format_double(wc.p_tail) << "\np_tail_gauss "
            << format_double(tail_probability_gaussian(m, q)) << "\nevaluations "
            << wc.evaluations << '\n';
}

void run_sweep_cmd(const SweepArgs& a) {
  auto is = open_in(a.config);
  SweepConfig cfg = load_sweep_config(is);
  if (!a.output.empty()) cfg.output = a.output;
  if (a.workers >= 0) cfg.workers = a.workers;
  if (a.matched) {
    const auto records = run_matched_sweep(cfg);
    const auto summary = summarize_matched(records);
    write_matched_summary(std::cout, summary);
  } else {
    const auto records = run_sweep(cfg);
    const auto summary = summarize_sweep(records);
    write_sweep_summary(std::cout, summary);
  }
}

void run_rip(const RipArgs& a) {
  if (!a.records.empty()) {
    auto is = open_in(a.records);
    const auto records = read_sweep_records(is);
    const auto rows = rip_report(records, a.n, a.ks);
    emit(a.out, [&](std::ostream& os) { write_rip_report(os, rows); });
    return;
  }
  if (a.p_tail < 0.0) throw std::invalid_argument("rip-bound needs --p-tail or --records");
  std::vector<RipReportRow> rows;
  for (int k : a.ks) rows.push_back({0, 0, 0, rip_bound(a.p_tail, a.n, k, a.delta)});
  emit(a.out, [&](std::ostream& os) { write_rip_report(os, rows); });
}

void run_recover(RecoverArgs a) {
  a.e2e.decoder.tolerance = a.tolerance;
  a.e2e.decoder.max_iterations = a.max_iterations;
  if (a.end_to_end) {
    a.e2e.law = a.gaussian_law ? NonzeroLaw::kGaussian : NonzeroLaw::kRademacher;
    const EndToEndRecord r = run_end_to_end(a.e2e);
    std::cout << "m " << r.m << "\nnoise_radius " << format_double(r.noise_radius)
              << "\nsaturations " << r.saturations << "\nresidual_norm "
              << format_double(r.residual_norm) << "\ncertified " << r.certified << '\n';
    write_metrics_header(std::cout);
    write_metrics_record(std::cout, "end_to_end", r.metrics);
    return;
  }
  if (a.problem.empty()) throw std::invalid_argument("recover needs --problem or --end-to-end");
  auto is = open_in(a.problem);
  const RecoveryProblem p = load_problem(is);
  const DecodeResult r = l1_min_decode(p, a.e2e.decoder);
  emit(a.out, [&](std::ostream& os) { save_solution(os, r); });
  if (p.truth) {
    write_metrics_header(std::cerr);
    write_metrics_record(std::cerr, "problem",
                         recovery_report(r.s, *p.truth, Matrix::Identity(r.s.size(), r.s.size())));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized network coding simulator and analysis toolkit"};
  app.require_subcommand(1);

  DeployArgs deploy;
  auto* c_deploy = app.add_subcommand("deploy", "Draw a random deployment graph");
  c_deploy->add_option("--nodes", deploy.nodes, "Node count n")->capture_default_str();
  c_deploy->add_option("--edges", deploy.edges, "Edge count |E|")->capture_default_str();
  c_deploy->add_option("--capacity", deploy.capacity, "Edge capacity in bits per use")
      ->capture_default_str();
  c_deploy->add_option("--seed", deploy.seed, "Deployment seed")->capture_default_str();
  c_deploy->add_option("-o,--out", deploy.out, "Graph file (stdout when omitted)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run QNC on a graph with a sparse message");
  c_sim->add_option("--graph", sim.graph, "Graph file from deploy")->required();
  c_sim->add_option("-T,--final-time", sim.final_time, "Stop time T")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Coefficient seed")->capture_default_str();
  c_sim->add_option("--bits", sim.bits, "Quantizer bits per edge; <= 0 disables")
      ->capture_default_str();
  c_sim->add_option("-k,--sparsity", sim.sparsity, "Message sparsity")->capture_default_str();
  c_sim->add_option("--message-seed", sim.message_seed, "Message seed")->capture_default_str();
  c_sim->add_option("--system-out", sim.system_out, "Write the measurement system here");
  c_sim->add_option("--problem-out", sim.problem_out, "Write a recovery problem here");

  TailArgs tail;
  auto* c_tail = app.add_subcommand("tail", "Tail probability P(|‖Φx‖² - 1| >= ε)");
  c_tail->add_option("--graph", tail.graph, "Graph file; worst case over unit x");
  c_tail->add_option("-T,--final-time", tail.final_time, "Stop time T")->capture_default_str();
  c_tail->add_option("--seed", tail.seed, "Coefficient seed")->capture_default_str();
  c_tail->add_option("--delta", tail.delta, "RIP constant; ε = δ/√2")->capture_default_str();
  c_tail->add_option("--epsilon", tail.epsilon, "Explicit ε (overrides --delta)");
  c_tail->add_option("--lambdas", tail.lambdas, "Evaluate a weighted chi-square directly")
      ->delimiter(',');
  c_tail->add_option("--gaussian-m", tail.gaussian_m, "Gaussian ensemble with m rows");
  c_tail->add_option("--random-starts", tail.budget.random_starts, "Random search starts")
      ->capture_default_str();
  c_tail->add_option("--refine-starts", tail.budget.refine_starts, "Starts refined by ascent")
      ->capture_default_str();
  c_tail->add_option("--max-sweeps", tail.budget.max_sweeps, "Ascent sweeps per start")
      ->capture_default_str();
  c_tail->add_option("--search-seed", tail.budget.seed, "Search seed")->capture_default_str();
  c_tail->add_option("--workers", tail.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Run a tail-probability sweep from a config");
  c_sweep->add_option("-c,--config", sweep.config, "INI file with a [sweep] section")
      ->required();
  c_sweep->add_option("-o,--output", sweep.output, "Output base path (overrides config)");
  c_sweep->add_option("--workers", sweep.workers, "Worker threads (overrides config)");
  c_sweep->add_flag("--matched", sweep.matched, "Matched-tail minimum measurement analysis");

  RipArgs rip;
  auto* c_rip = app.add_subcommand("rip-bound", "Lower bound on the RIP probability");
  c_rip->add_option("--p-tail", rip.p_tail, "Tail probability at ε = δ/√2");
  c_rip->add_option("-n", rip.n, "Message length")->capture_default_str();
  c_rip->add_option("-k", rip.ks, "Sparsity levels")->delimiter(',')->capture_default_str();
  c_rip->add_option("--delta", rip.delta, "RIP constant")->capture_default_str();
  c_rip->add_option("--records", rip.records, "Sweep records file to report on");
  c_rip->add_option("-o,--out", rip.out, "Report file (stdout when omitted)");

  RecoverArgs rec;
  auto* c_rec = app.add_subcommand("recover", "l1-min decoding");
  c_rec->add_option("--problem", rec.problem, "Recovery problem file");
  c_rec->add_option("-o,--out", rec.out, "Solution file (stdout when omitted)");
  c_rec->add_option("--tolerance", rec.tolerance, "Decoder tolerance")->capture_default_str();
  c_rec->add_option("--max-iterations", rec.max_iterations, "Decoder iteration cap")
      ->capture_default_str();
  c_rec->add_flag("--end-to-end", rec.end_to_end, "Run deploy, simulate and decode in one go");
  c_rec->add_option("--nodes", rec.e2e.node_count, "End-to-end: n")->capture_default_str();
  c_rec->add_option("--edges", rec.e2e.edge_count, "End-to-end: |E|")->capture_default_str();
  c_rec->add_option("-k,--sparsity", rec.e2e.sparsity, "End-to-end: k")->capture_default_str();
  c_rec->add_option("-T,--final-time", rec.e2e.final_time, "End-to-end: T")
      ->capture_default_str();
  c_rec->add_option("--bits", rec.e2e.quantizer_bits, "End-to-end: quantizer bits, <= 0 off")
      ->capture_default_str();
  c_rec->add_option("--range-multiple", rec.e2e.range_multiple,
                    "End-to-end: q_max in dry-run standard deviations")
      ->capture_default_str();
  c_rec->add_flag("--random-basis", rec.e2e.random_basis, "End-to-end: random orthonormal φ");
  c_rec->add_flag("!--rademacher", rec.gaussian_law, "End-to-end: ±1 nonzeros");
  c_rec->add_option("--seed", rec.e2e.seed, "End-to-end seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*c_deploy) run_deploy(deploy);
    if (*c_sim) run_simulate(sim);
    if (*c_tail) run_tail(tail);
    if (*c_sweep) run_sweep_cmd(sweep);
    if (*c_rip) run_rip(rip);
    if (*c_rec) run_recover(rec);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
