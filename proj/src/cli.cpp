#include "mcot/cli.hpp"

#include "mcot/acceptance.hpp"
#include "mcot/error.hpp"
#include "mcot/io.hpp"

#include "CLI11.hpp"

#include <optional>
#include <string>

namespace mcot {

namespace {

using nlohmann::json;

struct Config {
  std::string chain, mu0, mu1, rho0, params, out;
  std::string format = "json";
  int steps = 32;
  int restarts = 4;
  std::uint64_t seed = 0;
  std::optional<double> dt;
  double t_max = 200.0;
  double stop_tol = 1e-10;
  double eps = 0.1;
  std::vector<int> only;
};

const CLI::Validator open_unit = CLI::Validator(
    [](std::string& s) -> std::string {
      const double v = std::stod(s);
      return (v > 0.0 && v < 1.0) ? std::string() : std::string("must lie in (0, 1)");
    },
    "(0,1)");

MarkovChain load_chain(const Config& cfg) {
  KernelFile file = read_kernel_file(cfg.chain);
  return build_chain(file.kernel, std::move(file.labels));
}

TransportParams load_params(const Config& cfg, const MarkovChain& chain) {
  if (cfg.params.empty()) return make_params(1.0, 1.0, Vector::Ones(chain.size()), chain);
  ParamsFile file = read_params_file(cfg.params);
  if (file.p.size() == 0) file.p = Vector::Ones(chain.size());
  return make_params(file.a, file.b, std::move(file.p), chain, file.normalize_p);
}

Density load_density(const std::string& path, const MarkovChain& chain) {
  Density mu = read_density_file(path);
  if (mu.size() != chain.size()) {
    throw Error(ErrorCode::InvalidArgument, path + ": expected " + std::to_string(chain.size()) + " values");
  }
  return mu;
}

DistanceOptions distance_options(const Config& cfg) {
  DistanceOptions opts;
  opts.n_steps = cfg.steps;
  opts.restarts = cfg.restarts;
  opts.seed = cfg.seed;
  opts.init_eps = cfg.eps;
  return opts;
}

int cmd_validate(const Config& cfg, std::ostream& out) {
  const MarkovChain chain = load_chain(cfg);
  json report = {{"n", chain.size()},
                 {"labels", chain.labels()},
                 {"stationary", to_json(chain.stationary())},
                 {"reversibility_defect", chain.reversibility_defect()},
                 {"stationary_residual", chain.stationary_residual()},
                 {"irreducible", true}};
  if (!cfg.params.empty()) {
    const TransportParams params = load_params(cfg, chain);
    report["params"] = {{"a", params.a}, {"b", params.b}, {"p_mass", params.p.dot(chain.stationary())}};
  }
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_spectrum(const Config& cfg, std::ostream& out) {
  const MarkovChain chain = load_chain(cfg);
  const SpectrumReport spec = weighted_spectrum(chain);
  out << json{{"eigenvalues", to_json(spec.eigenvalues)},
              {"spectral_gap", spec.spectral_gap},
              {"top_eigenvector_defect", spec.top_eigenvector_defect}}
             .dump(2)
      << '\n';
  return 0;
}

int cmd_distance(const Config& cfg, std::ostream& out) {
  const MarkovChain chain = load_chain(cfg);
  const TransportParams params = load_params(cfg, chain);
  const Density mu0 = load_density(cfg.mu0, chain);
  const Density mu1 = load_density(cfg.mu1, chain);
  const DistanceEstimate est = estimate_distance(mu0, mu1, params, chain, distance_options(cfg));
  json report = distance_report(est);
  report["l1_check"] = l1_report(l1_bounds(mu0, mu1, params, chain, est.upper_bound, 256, cfg.seed));
  if (!cfg.out.empty()) write_text_file(cfg.out, cfg.format == "csv" ? path_csv(est.path) : report.dump(2) + "\n");
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_bounds(const Config& cfg, std::ostream& out) {
  const MarkovChain chain = load_chain(cfg);
  const TransportParams params = load_params(cfg, chain);
  const Density mu0 = load_density(cfg.mu0, chain);
  const Density mu1 = load_density(cfg.mu1, chain);
  const DistanceEstimate est = estimate_distance(mu0, mu1, params, chain, distance_options(cfg));
  json report = l1_report(l1_bounds(mu0, mu1, params, chain, est.upper_bound, 256, cfg.seed));
  report["upper_bound"] = est.upper_bound;
  report["lower_bound"] = est.lower_bound;
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_flow(const Config& cfg, std::ostream& out, std::ostream& err) {
  const MarkovChain chain = load_chain(cfg);
  const TransportParams params = load_params(cfg, chain);
  const Density rho0 = load_density(cfg.rho0, chain);
  FlowOptions opts = default_flow_options(params);
  if (cfg.dt) opts.dt = *cfg.dt;
  opts.t_max = cfg.t_max;
  opts.stop_tol = cfg.stop_tol;
  const FlowTrajectory traj = integrate_flow(rho0, params, chain, opts);
  if (!cfg.out.empty()) write_text_file(cfg.out, trajectory_csv(traj));

  const double gap = weighted_spectrum(chain).spectral_gap;
  const double final_l2 = l2_norm(traj.states.back().values - Vector::Ones(chain.size()), chain);
  json report;
  if (traj.converged && traj.times.back() == 0.0) {
    report = {{"equilibrium", true}, {"l2_distance_final", final_l2}, {"spectral_gap", gap}};
    err << "equilibrium: initial density is already within stop_tol of 1\n";
  } else {
    const DecayReport decay = estimate_decay(traj, chain);
    report = decay_report(decay, gap);
    report["equilibrium"] = false;
    err << "fitted_rate " << decay.fitted_rate << "  loja_constant " << decay.loja_constant
        << "  l2_distance_final " << decay.l2_distance_final << '\n';
  }
  report["converged"] = traj.converged;
  report["final_time"] = traj.times.back();
  report["local_loja_constant"] = local_lojasiewicz_constant(params, chain, gap);
  report["log_positivity_floor"] = traj.log_positivity_floor;
  report["min_state"] = *std::min_element(traj.min_state.begin(), traj.min_state.end());
  report["halvings_used"] = traj.halvings_used;
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_loja(const Config& cfg, std::ostream& out) {
  const MarkovChain chain = load_chain(cfg);
  const TransportParams params = load_params(cfg, chain);
  const double gap = weighted_spectrum(chain).spectral_gap;
  json report;
  double level = 1.0;
  if (!cfg.rho0.empty()) {
    const Density rho0 = load_density(cfg.rho0, chain);
    level = entropy_gap(rho0, chain);
    if (level >= 1e-14) report["ratio_at_rho0"] = lojasiewicz_ratio(rho0, params, chain);
  }
  report["level"] = level;
  if (level > 0.0) {
    report["sampled_constant"] = sample_lojasiewicz_constant(level, params, chain, 200, cfg.seed);
    report["sampled_constant_kind"] = "sampled estimate";
  }
  report["local_constant"] = local_lojasiewicz_constant(params, chain, gap);
  report["spectral_gap"] = gap;
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_demo(const Config& cfg, std::ostream& out) {
  AcceptanceOptions opts;
  if (cfg.seed != 0) opts.seed = cfg.seed;
  opts.only = cfg.only;
  bool all = true;
  run_acceptance(opts, [&](const CriterionResult& r) {
    out << format_result(r) << std::endl;
    all = all && r.passed;
  });
  return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transport distance and entropy flow on reversible Markov chains", "mcot"};
  app.require_subcommand(1);
  Config cfg;

  auto add_chain = [&](CLI::App* sub) { sub->add_option("--chain", cfg.chain, "kernel JSON")->required(); };
  auto add_params = [&](CLI::App* sub) { sub->add_option("--params", cfg.params, "params JSON"); };
  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("--mu0", cfg.mu0, "initial density JSON")->required();
    sub->add_option("--mu1", cfg.mu1, "final density JSON")->required();
    sub->add_option("--steps", cfg.steps, "time intervals")->check(CLI::Range(2, 100000));
    sub->add_option("--restarts", cfg.restarts, "optimizer restarts")->check(CLI::Range(1, 1000));
    sub->add_option("--seed", cfg.seed, "restart seed");
    sub->add_option("--eps", cfg.eps, "lift of the initial path")->check(open_unit);
  };

  CLI::App* validate = app.add_subcommand("validate", "check a chain (and params)");
  add_chain(validate);
  add_params(validate);

  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues and spectral gap");
  add_chain(spectrum);

  CLI::App* distance = app.add_subcommand("distance", "estimate the transport distance");
  add_chain(distance);
  add_params(distance);
  add_pair(distance);
  distance->add_option("--out", cfg.out, "write the path CSV or the report JSON");
  distance->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* bounds = app.add_subcommand("bounds", "L1 comparison constants");
  add_chain(bounds);
  add_params(bounds);
  add_pair(bounds);

  CLI::App* flow = app.add_subcommand("flow", "integrate the entropy gradient flow");
  add_chain(flow);
  add_params(flow);
  flow->add_option("--rho0", cfg.rho0, "initial density JSON")->required();
  flow->add_option("--dt", cfg.dt, "time step")->check(CLI::PositiveNumber);
  flow->add_option("--t-max", cfg.t_max, "final time")->check(CLI::NonNegativeNumber);
  flow->add_option("--stop-tol", cfg.stop_tol, "stop once ||rho - 1|| falls below")->check(CLI::PositiveNumber);
  flow->add_option("--out", cfg.out, "trajectory CSV");
  flow->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* loja = app.add_subcommand("loja", "Lojasiewicz constants");
  add_chain(loja);
  add_params(loja);
  loja->add_option("--rho0", cfg.rho0, "density fixing the sublevel set");
  loja->add_option("--seed", cfg.seed, "sampling seed");

  CLI::App* demo = app.add_subcommand("demo", "run the self-check suite");
  demo->add_option("--seed", cfg.seed, "suite seed");
  demo->add_option("--only", cfg.only, "criterion ids to run")->check(CLI::Range(1, 11));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return cmd_validate(cfg, out);
    if (*spectrum) return cmd_spectrum(cfg, out);
    if (*distance) return cmd_distance(cfg, out);
    if (*bounds) return cmd_bounds(cfg, out);
    if (*flow) return cmd_flow(cfg, out, err);
    if (*loja) return cmd_loja(cfg, out);
    if (*demo) return cmd_demo(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_io() ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mcot
