// riskctl: batch front end for the risk-averse control solvers.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "riskctl/cli.hpp"
#include "riskctl/error.hpp"

namespace {

using riskctl::cli::ExitCode;
using riskctl::cli::RunConfig;

struct Flags {
  std::string config_path;
  std::string system, solver, variant, out;
  std::vector<double> thetas, alphas, r, gammas;
  std::vector<std::string> x0;
  int s_res = 0;
  double grid_step = 0.0;
  std::size_t n = 0, jobs = 0, mem_budget = 0, u_points = 0;
  std::uint64_t seed = 0;
};

struct Bound {
  CLI::Option* config;
  CLI::Option *system, *solver, *variant, *out, *theta, *alpha, *r, *gamma, *x0, *s_res, *grid_step, *n, *jobs,
      *mem_budget, *u_points, *seed;
};

Bound add_flags(CLI::App* sub, Flags& f) {
  Bound b{};
  b.config = sub->add_option("--config", f.config_path, "JSON run configuration; flags override its fields");
  b.system = sub->add_option("--system", f.system, "thermostat | stormwater | pedagogical");
  b.solver = sub->add_option("--solver", f.solver, "eu | cvar | risk-neutral");
  b.theta = sub->add_option("--theta", f.thetas, "EU risk parameters (negative), comma separated or repeated")->delimiter(',');
  b.alpha = sub->add_option("--alpha", f.alphas, "CVaR levels in (0,1], comma separated or repeated")->delimiter(',');
  b.variant = sub->add_option("--variant", f.variant, "EU cost variant: raw | nonnegative");
  b.s_res = sub->add_option("--s-res", f.s_res, "budget-grid intervals on [0, a_upper]");
  b.grid_step = sub->add_option("--grid-step", f.grid_step, "stormwater state-grid step in ft");
  b.n = sub->add_option("--n", f.n, "trajectories per simulation");
  b.seed = sub->add_option("--seed", f.seed, "random seed");
  b.x0 = sub->add_option("--x0", f.x0, "initial state, components comma separated; repeat for more states");
  b.r = sub->add_option("--r", f.r, "safe-set thresholds, comma separated or repeated")->delimiter(',');
  b.gamma = sub->add_option("--gamma", f.gammas, "certainty-equivalent weights (pedagogical)")->delimiter(',');
  b.u_points = sub->add_option("--u-points", f.u_points, "u-grid points on [0, 0.25] (pedagogical)");
  b.out = sub->add_option("--out", f.out, "output directory");
  b.jobs = sub->add_option("--jobs", f.jobs, "worker threads (RISKCTL_JOBS overrides)");
  b.mem_budget = sub->add_option("--mem-budget", f.mem_budget, "byte limit for CVaR tables");
  return b;
}

RunConfig build_config(const std::string& command, const Flags& f, const Bound& b) {
  RunConfig c;
  if (b.config->count() > 0) {
    std::ifstream in(f.config_path);
    if (!in) throw riskctl::InputError("config: cannot read " + f.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    c = riskctl::cli::parse_config_json(ss.str(), c);
  }
  c.command = command;
  if (b.system->count()) c.system = f.system;
  if (b.solver->count()) c.solver = f.solver;
  if (b.theta->count()) c.thetas = f.thetas;
  if (b.alpha->count()) c.alphas = f.alphas;
  if (b.variant->count()) c.variant = riskctl::parse_eu_variant(f.variant);
  if (b.s_res->count()) c.s_resolution = f.s_res;
  if (b.grid_step->count()) c.grid_step = f.grid_step;
  if (b.n->count()) c.n = f.n;
  if (b.seed->count()) c.seed = f.seed;
  if (b.x0->count()) {
    c.x0.clear();
    for (const auto& s : f.x0) c.x0.push_back(riskctl::cli::parse_state(s));
  }
  if (b.r->count()) c.r = f.r;
  if (b.gamma->count()) c.gammas = f.gammas;
  if (b.u_points->count()) c.u_points = f.u_points;
  if (b.out->count()) c.out = f.out;
  if (b.jobs->count()) c.jobs = f.jobs;
  if (b.mem_budget->count()) c.memory_budget = f.mem_budget;
  riskctl::cli::apply_environment(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-averse stochastic optimal control on grids (EU, CVaR, risk-neutral)"};
  app.set_version_flag("--version", riskctl::cli::kVersion);
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "solve and write values_<param>.csv and policy_<param>.csv"},
      {"simulate", "solve, simulate, and write samples and tradeoff.csv"},
      {"tradeoff", "solve, simulate, and write tradeoff.csv"},
      {"safe-sets", "solve and write safesets_<param>_<r>.csv"},
      {"pedagogical", "closed-form curves of the quadratic one-step example"}};
  std::vector<Flags> flags(commands.size());
  std::vector<Bound> bound;
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, commands[i].second);
    subs.push_back(sub);
    bound.push_back(add_flags(sub, flags[i]));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    RunConfig config;
    try {
      config = build_config(commands[i].first, flags[i], bound[i]);
    } catch (const riskctl::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return static_cast<int>(ExitCode::kValidation);
    }
    return static_cast<int>(riskctl::cli::run(config, std::cerr));
  }
  return static_cast<int>(ExitCode::kFailure);
}
