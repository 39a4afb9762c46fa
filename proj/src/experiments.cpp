#include "fdpp/experiments.hpp"

#include "fdpp/bdg.hpp"
#include "fdpp/circuit.hpp"
#include "fdpp/io.hpp"
#include "fdpp/kernels.hpp"
#include "fdpp/qr.hpp"
#include "fdpp/rng.hpp"
#include "fdpp/samplers.hpp"
#include "fdpp/sim.hpp"

#include <filesystem>
#include <sstream>

namespace fdpp {

namespace {

RotationSchedule<double> make_schedule(const MatrixC<double>& factor,
                                       const std::string& scheduler) {
  if (scheduler == "logdepth") return schedule_log_depth(factor);
  require(scheduler == "sk", "unknown scheduler: " + scheduler);
  return schedule_sameh_kuck(factor);
}

// Frequencies of `shots` independent draws taken directly from a pmf; the
// null reference for the sampled total-variation statistic.
Eigen::VectorXd resample_pmf(const Eigen::VectorXd& pmf, Index shots,
                             RngSpec spec) {
  Eigen::VectorXd cdf(pmf.size());
  double acc = 0;
  for (Index i = 0; i < pmf.size(); ++i) {
    acc += std::max(pmf(i), 0.0);
    cdf(i) = acc;
  }
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(pmf.size());
  for (Index i = 0; i < shots; ++i) {
    CounterRng rng(substream(spec, 3, static_cast<std::uint64_t>(i)));
    freq(discrete_from_cdf(cdf, uniform01(rng))) += 1;
  }
  if (shots > 0) freq /= static_cast<double>(shots);
  return freq;
}

void finish_sampled_comparison(ExperimentResult& res,
                               const FockState<double>& state,
                               const ExperimentConfig& cfg, RngSpec spec) {
  if (cfg.exact) {
    Eigen::VectorXd sim_pmf = exact_distribution(state);
    res.empirical = sim_pmf;
    res.tv = tv_distance<double>(sim_pmf, res.exact_pmf);
    res.tv_null = 0;
    return;
  }
  res.samples = sample_occupations(state, cfg.shots, spec, cfg.noise);
  res.empirical = empirical_distribution<double>(res.samples, res.n_modes);
  res.tv = tv_distance<double>(res.empirical, res.exact_pmf);
  res.tv_null =
      tv_distance<double>(resample_pmf(res.exact_pmf, cfg.shots, spec),
                          res.exact_pmf);
}

}  // namespace

ExperimentResult run_experiment_projection(const ExperimentConfig& cfg) {
  const Index n = 5;
  const Index r = 3;
  RngSpec spec{cfg.seed, 0};

  // Random orthonormal rows: QR of a seeded Gaussian matrix.
  CounterRng gen(substream(spec, 2, 0));
  Eigen::MatrixXd g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = normal01(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  MatrixC<double> factor =
      q.leftCols(r).transpose().cast<std::complex<double>>();

  ExperimentResult res;
  res.n_modes = n;
  res.rank = r;

  DppKernel<double> kernel =
      validate_dpp_kernel<double>(MatrixC<double>(factor.adjoint() * factor));
  res.exact_pmf = brute_force_distribution(kernel);

  RotationSchedule<double> sched = make_schedule(factor, cfg.scheduler);
  Circuit<double> circuit = compile_projection_circuit(sched);
  FockState<double> state = run_circuit(circuit);
  finish_sampled_comparison(res, state, cfg, spec);

  std::ostringstream sum;
  sum << "projection ensemble: N=" << n << " r=" << r << " seed=" << cfg.seed
      << "\n";
  sum << "rotations=" << schedule_rotation_count(sched)
      << " rounds=" << sched.rounds.size() << "\n";
  sum << (cfg.exact ? "exact amplitude check, tv=" : "sampled tv=")
      << format_double(res.tv);
  if (!cfg.exact)
    sum << " (null resample tv=" << format_double(res.tv_null) << ")";
  sum << "\n";
  if (cfg.noise > 0)
    sum << "readout noise rate " << format_double(cfg.noise) << "\n";
  res.summary = sum.str();

  if (!cfg.out_dir.empty()) emit_plots_data(res, cfg.out_dir);
  return res;
}

ExperimentResult run_experiment_pfpp(const ExperimentConfig& cfg) {
  const Index n = 5;
  RngSpec spec{cfg.seed, 1};

  Eigen::MatrixXd m(n, n);
  m << 1.0, 0.5, 0.2, 0.2, 0.2,
       0.5, 1.0, 0.5, 0.2, 0.2,
       0.2, 0.5, 1.0, 0.5, 0.2,
       0.2, 0.2, 0.5, 1.0, 0.5,
       0.2, 0.2, 0.2, 0.5, 1.0;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    delta(i, i + 1) = 1.0;
    delta(i + 1, i) = -1.0;
  }

  BdGHamiltonian<double> ham = make_bdg<double>(
      m.cast<std::complex<double>>(), delta.cast<std::complex<double>>());
  BogoliubovTransform<double> t = diagonalize_bdg(ham);

  // Occupy the three lowest strictly positive quasimode energies.
  std::vector<int> occupied;
  for (Index k = 0; k < n && static_cast<Index>(occupied.size()) < 3; ++k)
    if (t.epsilons(k) > 1e-10) occupied.push_back(static_cast<int>(k) + 1);
  require(occupied.size() == 3, "pfpp experiment: not enough positive modes");

  ExperimentResult res;
  res.n_modes = n;
  res.rank = static_cast<Index>(occupied.size());

  SMatrix<double> s = s_matrix_projective(t, occupied);
  PfaffianKernel<double> pk = pfaffian_kernel_from_s(s);
  res.exact_pmf = brute_force_distribution(pk);
  res.parity_predicted = parity_prediction_projective(t, occupied);

  PhFactorization<double> ph = factorize_particle_hole(t);
  Circuit<double> circuit = compile_pfpp_circuit(ph, occupied);
  FockState<double> state = run_circuit(circuit);
  finish_sampled_comparison(res, state, cfg, spec);

  res.parity_uniform = true;
  if (!res.samples.empty()) {
    const int first = (popcount64(res.samples.front()) & 1) ? -1 : 1;
    res.parity_observed = first;
    for (std::uint64_t sample : res.samples) {
      const int par = (popcount64(sample) & 1) ? -1 : 1;
      if (par != first) res.parity_uniform = false;
    }
  } else {
    res.parity_observed = res.parity_predicted;
  }

  std::ostringstream sum;
  sum << "pairing ensemble: N=" << n << " occupied={1,2,3} seed=" << cfg.seed
      << "\n";
  sum << (cfg.exact ? "exact amplitude check, tv=" : "sampled tv=")
      << format_double(res.tv);
  if (!cfg.exact)
    sum << " (null resample tv=" << format_double(res.tv_null) << ")";
  sum << "\n";
  sum << "parity predicted=" << res.parity_predicted
      << " observed=" << res.parity_observed
      << (res.parity_uniform ? " uniform" : " MIXED") << "\n";
  res.summary = sum.str();

  if (!cfg.out_dir.empty()) emit_plots_data(res, cfg.out_dir);
  return res;
}

void emit_plots_data(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir + "/exact_pmf.csv", pmf_csv(result.exact_pmf, result.n_modes));
  if (!result.samples.empty())
    write_text_file(dir + "/empirical.csv",
                    histogram_csv(result.samples, result.n_modes));
  else
    write_text_file(dir + "/empirical.csv",
                    pmf_csv(result.empirical, result.n_modes));
  std::ostringstream sum;
  sum << result.summary;
  sum << "tv," << format_double(result.tv) << "\n";
  sum << "tv_null," << format_double(result.tv_null) << "\n";
  write_text_file(dir + "/summary.txt", sum.str());
}

}  // namespace fdpp
