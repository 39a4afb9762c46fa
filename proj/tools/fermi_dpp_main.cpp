// fermi-dpp: compile determinantal and Pfaffian point-process kernels into
// fermionic Givens circuits, simulate them exactly, and cross-check sampled
// statistics against closed-form distributions.

#include "fdpp/bdg.hpp"
#include "fdpp/circuit.hpp"
#include "fdpp/experiments.hpp"
#include "fdpp/io.hpp"
#include "fdpp/kernels.hpp"
#include "fdpp/qasm.hpp"
#include "fdpp/qr.hpp"
#include "fdpp/rng.hpp"
#include "fdpp/samplers.hpp"
#include "fdpp/sim.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace fdpp;

KernelSpec load_spec(const std::string& path) {
  return kernel_spec_from_json(nlohmann::json::parse(read_text_file(path)));
}

// Orthonormal factor for a projection input: direct for factor files,
// spectral for Hermitian kernels that are projections.
MatrixC<double> factor_from_spec(const KernelSpec& spec) {
  if (spec.type == "projection_factor") {
    return make_projection_factor(spec.factor).q;
  }
  if (spec.type == "hermitian") {
    DppKernel<double> k = validate_dpp_kernel(spec.kernel);
    require(k.is_projection,
            "this command needs a projection kernel or factor");
    Index r = 0;
    for (Index i = 0; i < k.eigen.eigenvalues.size(); ++i)
      if (k.eigen.eigenvalues(i) > 0.5) ++r;
    MatrixC<double> q(r, k.matrix.rows());
    Index row = 0;
    for (Index i = 0; i < k.eigen.eigenvalues.size(); ++i)
      if (k.eigen.eigenvalues(i) > 0.5)
        q.row(row++) = k.eigen.eigenvectors.col(i).adjoint();
    return q;
  }
  fail("this command needs a projection_factor or hermitian kernel file");
}

CouplingGraph parse_graph_arg(const std::string& arg, Index n_modes) {
  std::vector<std::pair<int, int>> edges;
  std::string token;
  std::istringstream in(arg);
  while (std::getline(in, token, ',')) {
    const auto dash = token.find('-');
    require(dash != std::string::npos, "bad graph edge: " + token);
    edges.push_back({std::stoi(token.substr(0, dash)),
                     std::stoi(token.substr(dash + 1))});
  }
  return make_coupling_graph(static_cast<int>(n_modes), edges);
}

RotationSchedule<double> schedule_from_spec(const KernelSpec& spec,
                                            const std::string& mode,
                                            const std::string& graph_arg) {
  MatrixC<double> factor = factor_from_spec(spec);
  if (mode == "sk") return schedule_sameh_kuck(factor);
  if (mode == "logdepth") return schedule_log_depth(factor);
  if (mode == "graph") {
    require(!graph_arg.empty(), "--mode graph needs --graph edge list");
    return schedule_graph_constrained(
        factor, parse_graph_arg(graph_arg, factor.cols()));
  }
  fail("unknown schedule mode: " + mode);
}

Circuit<double> circuit_from_spec(const KernelSpec& spec,
                                  const std::string& mode,
                                  const std::string& graph_arg) {
  if (spec.type == "bdg") {
    BogoliubovTransform<double> t =
        diagonalize_bdg(make_bdg(spec.m, spec.delta));
    PhFactorization<double> ph = factorize_particle_hole(t);
    return compile_pfpp_circuit(ph, spec.occupied);
  }
  return compile_projection_circuit(schedule_from_spec(spec, mode, graph_arg));
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    write_text_file(path, content);
}

int run_main(int argc, char** argv) {
  CLI::App app{
      "fermi-dpp: fermionic circuit compilation and validation for "
      "determinantal and Pfaffian point processes"};
  app.require_subcommand(1);

  std::string input, output, circuit_file, qasm_file, graph_arg;
  std::string mode = "sk";
  std::string method = "hkpv";
  std::string file_a, file_b;
  std::uint64_t seed = 1;
  Index shots = 20000;
  Index n_modes = 0;
  double noise = 0;
  double beta = 1;
  int threads = 1;
  bool exact = false;
  std::string out_dir;

  auto* validate = app.add_subcommand("validate-kernel", "check a kernel file");
  validate->add_option("--input", input)->required();

  auto* sched = app.add_subcommand("schedule", "build a rotation schedule");
  sched->add_option("--input", input)->required();
  sched->add_option("--mode", mode, "sk | logdepth | graph");
  sched->add_option("--graph", graph_arg, "edges like 1-2,2-3");
  sched->add_option("--output", output);

  auto* compile = app.add_subcommand("compile", "compile a preparation circuit");
  compile->add_option("--input", input)->required();
  compile->add_option("--mode", mode, "sk | logdepth | graph");
  compile->add_option("--graph", graph_arg, "edges like 1-2,2-3");
  compile->add_option("--output", output);
  compile->add_option("--qasm", qasm_file, "also export OPENQASM 2.0");

  auto* simulate = app.add_subcommand("simulate", "sample a circuit file");
  simulate->add_option("--circuit", circuit_file)->required();
  simulate->add_option("--shots", shots);
  simulate->add_option("--seed", seed);
  simulate->add_option("--noise", noise);
  simulate->add_option("--threads", threads);
  simulate->add_option("--output", output);

  auto* sample = app.add_subcommand("sample", "classical or circuit sampling");
  sample->add_option("--input", input)->required();
  sample->add_option("--method", method,
                     "hkpv | mixture | dilation | pfpp | circuit");
  sample->add_option("--shots", shots);
  sample->add_option("--seed", seed);
  sample->add_option("--noise", noise);
  sample->add_option("--beta", beta);
  sample->add_option("--mode", mode, "scheduler for --method circuit");
  sample->add_option("--graph", graph_arg);
  sample->add_option("--output", output);

  auto* pmf = app.add_subcommand("exact-pmf", "closed-form distribution");
  pmf->add_option("--input", input)->required();
  pmf->add_option("--output", output);

  auto* tv = app.add_subcommand("tv-compare", "total variation of two CSVs");
  tv->add_option("--a", file_a)->required();
  tv->add_option("--b", file_b)->required();
  tv->add_option("--modes", n_modes)->required();

  auto* exper = app.add_subcommand("experiment", "reference experiments");
  std::string which = "projection";
  exper->add_option("which", which, "projection | pfpp");
  exper->add_option("--seed", seed);
  exper->add_option("--shots", shots);
  exper->add_option("--noise", noise);
  exper->add_flag("--exact", exact);
  exper->add_option("--scheduler", mode, "sk | logdepth");
  exper->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    KernelSpec spec = load_spec(input);
    if (spec.type == "projection_factor") {
      ProjectionFactor<double> f = make_projection_factor(spec.factor);
      std::cout << "projection factor: rank " << f.q.rows() << " on "
                << f.q.cols() << " modes\n";
    } else if (spec.type == "hermitian") {
      DppKernel<double> k = validate_dpp_kernel(spec.kernel);
      std::cout << "hermitian kernel: " << k.matrix.rows()
                << " modes, spectrum [" << format_double(k.eigen.eigenvalues(0))
                << ", "
                << format_double(k.eigen.eigenvalues(k.eigen.eigenvalues.size() - 1))
                << "], projection=" << (k.is_projection ? "yes" : "no")
                << "\n";
    } else if (spec.type == "s_matrix") {
      SMatrix<double> s = make_s_matrix(spec.s);
      std::cout << "s-matrix: " << s.n << " modes, expected cardinality "
                << format_double(expected_cardinality(s)) << "\n";
    } else if (spec.type == "bdg") {
      BogoliubovTransform<double> t =
          diagonalize_bdg(make_bdg(spec.m, spec.delta));
      std::cout << "pairing hamiltonian: " << t.epsilons.size()
                << " modes, energies [";
      for (Index i = 0; i < t.epsilons.size(); ++i)
        std::cout << (i ? ", " : "") << format_double(t.epsilons(i));
      std::cout << "], det W = " << t.det_w << "\n";
    }
    std::cout << "ok\n";
    return 0;
  }

  if (sched->parsed()) {
    KernelSpec spec = load_spec(input);
    RotationSchedule<double> s = schedule_from_spec(spec, mode, graph_arg);
    std::cout << "schedule: " << schedule_rotation_count(s) << " rotations in "
              << s.rounds.size() << " rounds\n";
    if (!output.empty())
      write_text_file(output, schedule_to_json(s).dump(2) + "\n");
    return 0;
  }

  if (compile->parsed()) {
    KernelSpec spec = load_spec(input);
    Circuit<double> c = circuit_from_spec(spec, mode, graph_arg);
    CnotMetrics metrics = cnot_metrics(c);
    std::cout << "circuit: " << c.gates.size() << " gates, "
              << metrics.cnot_count << " cnots, depth " << metrics.depth
              << "\n";
    if (!output.empty())
      write_text_file(output, circuit_to_json(c).dump(2) + "\n");
    if (!qasm_file.empty()) write_text_file(qasm_file, export_qasm(c));
    return 0;
  }

  if (simulate->parsed()) {
    Circuit<double> c =
        circuit_from_json(nlohmann::json::parse(read_text_file(circuit_file)));
    FockState<double> state = run_circuit(c);
    auto samples =
        sample_occupations(state, shots, RngSpec{seed, 0}, noise, threads);
    write_or_print(output, histogram_csv(samples, c.n_modes));
    return 0;
  }

  if (sample->parsed()) {
    KernelSpec spec = load_spec(input);
    std::vector<std::uint64_t> samples;
    Index modes = 0;
    if (method == "hkpv") {
      MatrixC<double> factor = factor_from_spec(spec);
      modes = factor.cols();
      for (Index i = 0; i < shots; ++i)
        samples.push_back(
            hkpv_sample(factor, substream(RngSpec{seed, 0},
                                          static_cast<std::uint64_t>(i))));
    } else if (method == "mixture" || method == "dilation") {
      require(spec.type == "hermitian", "--method needs a hermitian kernel");
      DppKernel<double> k = validate_dpp_kernel(spec.kernel);
      modes = k.matrix.rows();
      for (Index i = 0; i < shots; ++i) {
        RngSpec s = substream(RngSpec{seed, 0}, static_cast<std::uint64_t>(i));
        samples.push_back(method == "mixture" ? sample_general_dpp(k, s)
                                              : sample_dpp_via_dilation(k, s));
      }
    } else if (method == "pfpp") {
      require(spec.type == "bdg", "--method pfpp needs a bdg kernel file");
      BogoliubovTransform<double> t =
          diagonalize_bdg(make_bdg(spec.m, spec.delta));
      modes = t.epsilons.size();
      samples = sample_pfpp(t, spec.beta, shots, RngSpec{seed, 0}, noise);
    } else if (method == "circuit") {
      Circuit<double> c = circuit_from_spec(spec, mode, graph_arg);
      modes = c.n_modes;
      FockState<double> state = run_circuit(c);
      samples = sample_occupations(state, shots, RngSpec{seed, 0}, noise);
    } else {
      fail("unknown sampling method: " + method);
    }
    write_or_print(output, histogram_csv(samples, modes));
    return 0;
  }

  if (pmf->parsed()) {
    KernelSpec spec = load_spec(input);
    if (spec.type == "bdg") {
      BogoliubovTransform<double> t =
          diagonalize_bdg(make_bdg(spec.m, spec.delta));
      SMatrix<double> s = spec.occupied.empty()
                              ? s_matrix_thermal(t, spec.beta)
                              : s_matrix_projective(t, spec.occupied);
      PfaffianKernel<double> pk = pfaffian_kernel_from_s(s);
      write_or_print(output,
                     pmf_csv(brute_force_distribution(pk), pk.n));
    } else if (spec.type == "s_matrix") {
      PfaffianKernel<double> pk = pfaffian_kernel_from_s(make_s_matrix(spec.s));
      write_or_print(output,
                     pmf_csv(brute_force_distribution(pk), pk.n));
    } else {
      MatrixC<double> kernel = spec.type == "projection_factor"
                                   ? MatrixC<double>(spec.factor.adjoint() *
                                                     spec.factor)
                                   : spec.kernel;
      DppKernel<double> k = validate_dpp_kernel(kernel);
      write_or_print(output, pmf_csv(brute_force_distribution(k),
                                     k.matrix.rows()));
    }
    return 0;
  }

  if (tv->parsed()) {
    Eigen::VectorXd pa = histogram_from_csv(read_text_file(file_a), n_modes);
    Eigen::VectorXd pb = histogram_from_csv(read_text_file(file_b), n_modes);
    std::cout << format_double(tv_distance<double>(pa, pb)) << "\n";
    return 0;
  }

  if (exper->parsed()) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.shots = shots;
    cfg.noise = noise;
    cfg.exact = exact;
    cfg.scheduler = mode;
    cfg.out_dir = out_dir;
    ExperimentResult res = which == "pfpp" ? run_experiment_pfpp(cfg)
                                           : run_experiment_projection(cfg);
    std::cout << res.summary;
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
