#include "riskctl/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <utility>

#include "riskctl/csv.hpp"
#include "riskctl/cvar_dp.hpp"
#include "riskctl/error.hpp"
#include "riskctl/example_systems.hpp"
#include "riskctl/kernels.hpp"
#include "riskctl/monte_carlo.hpp"
#include "riskctl/risk_neutral.hpp"
#include "riskctl/safe_sets.hpp"

namespace riskctl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands{"solve", "simulate", "tradeoff", "safe-sets", "pedagogical"};
const std::vector<std::string> kSolvers{"eu", "cvar", "risk-neutral"};

bool one_of(const std::string& v, const std::vector<std::string>& options) {
  for (const auto& o : options)
    if (o == v) return true;
  return false;
}

std::vector<State> default_initial_states(const std::string& system) {
  if (system == "stormwater") return {State{2.0, 2.0}, State{2.3, 2.3}};
  return {State{19.8}, State{20.0}, State{20.5}, State{21.0}, State{21.2}};
}

std::string state_label(const State& x) {
  std::string s;
  for (std::size_t d = 0; d < x.size(); ++d) s += (d ? ";" : "") + csv::number(x[d]);
  return s;
}

struct Param {
  std::string label;
  double value;
};

std::vector<Param> sweep(const RunConfig& c) {
  std::vector<Param> out;
  if (c.solver == "eu")
    for (double t : c.thetas) out.push_back({csv::number(t), t});
  else if (c.solver == "cvar")
    for (double a : c.alphas) out.push_back({csv::number(a), a});
  else
    out.push_back({"rn", 0.0});
  return out;
}

SystemModel build_model(const RunConfig& c) {
  if (c.system == "stormwater") {
    StormwaterOptions o;
    o.grid_step = c.grid_step;
    return make_stormwater(o);
  }
  return make_system(c.system);
}

class PhaseClock {
 public:
  template <class F>
  auto time(const std::string& name, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(name, start);
    } else {
      auto r = f();
      record(name, start);
      return r;
    }
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : phases_) j[k] = v;
    return j;
  }

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point start) {
    phases_[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  std::map<std::string, double> phases_;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  return f;
}

void write_state_header(std::ostream& o, const Grid& g) {
  for (std::size_t d = 0; d < g.dimension(); ++d) o << 'x' << (d + 1) << ',';
}

void write_values(const fs::path& path, const ValueTable& values, const ValueTable* budgets) {
  auto f = open_out(path);
  const Grid& g = *values.grid;
  write_state_header(f, g);
  f << "value" << (budgets ? ",budget" : "") << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (double x : g.node(i)) f << csv::number(x) << ',';
    f << csv::number(values.values[i]);
    if (budgets) f << ',' << csv::number(budgets->values[i]);
    f << '\n';
  }
}

void write_policy(const fs::path& path, const PolicyTable& policy, const std::vector<double>& controls,
                  bool augmented) {
  auto f = open_out(path);
  const Grid& g = *policy.grid;
  f << 't' << ',';
  const std::size_t state_dims = augmented ? g.dimension() - 1 : g.dimension();
  for (std::size_t d = 0; d < state_dims; ++d) f << 'x' << (d + 1) << ',';
  if (augmented) f << "s,";
  f << "control_index,control\n";
  for (int t = 0; t < policy.horizon(); ++t) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      f << t << ',';
      for (double x : g.node(i)) f << csv::number(x) << ',';
      const std::uint16_t u = policy.at(t, i);
      f << u << ',' << csv::number(controls[u]) << '\n';
    }
  }
}

void write_samples(const fs::path& path, const CostSampleSet& set) {
  auto f = open_out(path);
  f << "z\n";
  for (double z : set.samples) f << csv::number(z) << '\n';
}

json model_json(const SystemModel& m) {
  json axes = json::array();
  for (const Axis& a : m.grid().axes()) axes.push_back({{"lo", a.front()}, {"hi", a.back()}, {"nodes", a.size()}});
  return {{"name", m.name()},
          {"horizon", m.horizon()},
          {"state_axes", axes},
          {"controls", m.controls()},
          {"cost_lower", m.cost_lower()},
          {"cost_upper", m.cost_upper()},
          {"b_lower", m.bounds().b_lower},
          {"a_upper", m.bounds().a_upper},
          {"disturbance", {{"support", m.disturbance().support}, {"probabilities", m.disturbance().probabilities}}}};
}

json knobs_json(const RunConfig& c) {
  return {{"policy_lookup", "nearest grid node (midpoint resolves to the lower node)"},
          {"control_tie_break", "smallest control index"},
          {"budget_tie_break", "smallest s within 1e-12 relative of the minimum"},
          {"interpolation", "multilinear, states clamped to the grid box"},
          {"budget_below_grid", "affine extension J(x,s_min) + (s_min - s)"},
          {"budget_grid", {{"resolution", c.s_resolution}, {"negative_intervals", (c.s_resolution + 1) / 2}}},
          {"eu_arithmetic", "max-shifted log-sum-exp"},
          {"var_convention", "k = max(1, ceil((1 - alpha) n))"},
          {"cvar_estimator", "Rockafellar-Uryasev minimum over sample values"},
          {"variance_estimator", "unbiased (n - 1)"},
          {"random_streams", "SplitMix64 keyed on (seed, trajectory index)"},
          {"kernels", kernels::active().name},
          {"jobs", c.jobs},
          {"memory_budget_bytes", c.memory_budget}};
}

void write_tradeoff(const fs::path& path, const std::vector<std::pair<std::string, std::vector<TradeoffRow>>>& blocks) {
  auto f = open_out(path);
  f << "x0,parameter,alpha,mean,variance,var,exceedance,cvar\n";
  for (const auto& [x0, rows] : blocks) {
    for (const TradeoffRow& r : rows) {
      f << x0 << ',' << csv::number(r.parameter) << ',';
      if (r.alpha)
        f << csv::number(*r.alpha) << ',' << csv::number(r.mean) << ',' << csv::number(r.variance) << ','
          << csv::number(r.var) << ',' << csv::number(r.exceedance) << ',' << csv::number(r.cvar) << '\n';
      else
        f << ',' << csv::number(r.mean) << ',' << csv::number(r.variance) << ",,,\n";
    }
  }
}

void run_pedagogical(const RunConfig& c, const fs::path& out, PhaseClock& clock, json& manifest) {
  std::vector<double> u(c.u_points);
  for (std::size_t i = 0; i < c.u_points; ++i)
    u[i] = i + 1 == c.u_points ? 0.25 : 0.25 * static_cast<double>(i) / static_cast<double>(c.u_points - 1);
  const std::vector<double> alphas = c.alphas.empty() ? std::vector<double>{1.0, 0.5, 0.05, 0.005} : c.alphas;
  const auto rows = clock.time("solve", [&] { return pedagogical_curves(u, c.gammas, alphas); });
  clock.time("write", [&] {
    auto f = open_out(out / "pedagogical.csv");
    f << "u,mean,variance";
    for (double g : c.gammas) f << ",ce_" << csv::number(g);
    for (double a : alphas) f << ",cvar_" << csv::number(a);
    f << '\n';
    for (const auto& r : rows) {
      f << csv::number(r.u) << ',' << csv::number(r.mean) << ',' << csv::number(r.variance);
      for (double v : r.certainty_equivalent) f << ',' << csv::number(v);
      for (double v : r.cvar) f << ',' << csv::number(v);
      f << '\n';
    }
  });
  const PedagogicalDisturbance& w = pedagogical_disturbance();
  manifest["disturbance"] = {{"kind", "equiprobable skew-normal quantiles"},
                             {"atoms", w.values.size()},
                             {"shape", w.shape},
                             {"m3", w.m3},
                             {"m4", w.m4}};
}

void run_model(const RunConfig& c, const fs::path& out, PhaseClock& clock, json& manifest) {
  const SystemModel model = clock.time("build_model", [&] { return build_model(c); });
  manifest["model"] = model_json(model);
  const std::vector<State> x0 = c.x0.empty() ? default_initial_states(c.system) : c.x0;
  manifest["x0"] = json::array();
  for (const State& x : x0) {
    if (x.size() != model.dimension()) throw InputError("x0: state " + state_label(x) + " has the wrong dimension");
    if (!model.grid().contains(x)) throw InputError("x0: state " + state_label(x) + " lies outside the state grid");
    manifest["x0"].push_back(std::vector<double>(x.begin(), x.end()));
  }

  const bool want_sim = c.command == "simulate" || c.command == "tradeoff";
  const DpOptions dp{c.jobs, nullptr};
  std::vector<std::pair<std::string, std::vector<TradeoffRow>>> trade;
  std::map<std::string, std::map<double, CostSampleSet>> per_x0;  // x0 label -> param -> samples
  std::map<std::string, std::vector<TradeoffRow>> rows_by_x0;

  auto emit = [&](const Param& p, const ValueTable& values, const ValueTable* budgets) {
    if (c.command == "solve") clock.time("write", [&] { write_values(out / ("values_" + p.label + ".csv"), values, budgets); });
    if (c.command == "safe-sets") {
      clock.time("safe_sets", [&] {
        for (double r : c.r) {
          const SafeSetMask mask = sublevel_mask(values, r);
          auto f = open_out(out / ("safesets_" + p.label + "_" + csv::number(r) + ".csv"));
          write_safe_set_csv(f, values, mask);
        }
      });
    }
  };

  auto add_samples = [&](const Param& p, std::size_t k, const CostSampleSet& set, const std::vector<double>& alphas) {
    const std::string label = state_label(x0[k]);
    if (c.command == "simulate")
      clock.time("write", [&] {
        write_samples(out / ("samples_" + p.label + "_x" + std::to_string(k) + ".csv"), set);
      });
    auto rows = clock.time("statistics", [&] { return tradeoff_table({{p.value, set}}, alphas); });
    auto& dst = rows_by_x0[label];
    dst.insert(dst.end(), rows.begin(), rows.end());
  };

  if (c.solver == "eu") {
    for (const Param& p : sweep(c)) {
      const EuSolution sol = clock.time("solve", [&] { return solve_eu(model, p.value, c.variant, dp); });
      const ValueTable v = sol.optimal_values();
      emit(p, v, nullptr);
      if (c.command == "solve")
        clock.time("write", [&] { write_policy(out / ("policy_" + p.label + ".csv"), sol.policy, model.controls(), false); });
      if (want_sim)
        for (std::size_t k = 0; k < x0.size(); ++k)
          add_samples(p, k, clock.time("simulate", [&] { return simulate_eu(model, sol, x0[k], c.n, c.seed, c.jobs); }),
                      c.alphas);
    }
  } else if (c.solver == "risk-neutral") {
    const Param p = sweep(c).front();
    const RiskNeutralSolution sol = clock.time("solve", [&] { return solve_risk_neutral(model, dp); });
    const ValueTable v = cvar_upper_bound(sol.tables.at(0), 1.0, model.bounds().b_lower);
    emit(p, v, nullptr);
    if (c.command == "solve")
      clock.time("write", [&] { write_policy(out / ("policy_" + p.label + ".csv"), sol.policy, model.controls(), false); });
    if (want_sim)
      for (std::size_t k = 0; k < x0.size(); ++k)
        add_samples(p, k,
                    clock.time("simulate", [&] { return simulate_risk_neutral(model, sol, x0[k], c.n, c.seed, c.jobs); }),
                    c.alphas);
  } else {
    const CvarOptions opts{c.jobs, nullptr, c.memory_budget};
    const CvarInnerSolution inner = clock.time("solve", [&] { return solve_cvar_inner(model, c.s_resolution, opts); });
    for (const Param& p : sweep(c)) {
      const CvarValue v = clock.time("outer_minimize", [&] { return outer_minimize(inner, p.value, c.jobs); });
      emit(p, v.values, &v.budgets);
      if (c.command == "solve")
        clock.time("write", [&] { write_policy(out / ("policy_" + p.label + ".csv"), inner.policy, model.controls(), true); });
      if (want_sim)
        for (std::size_t k = 0; k < x0.size(); ++k)
          add_samples(p, k,
                      clock.time("simulate", [&] { return simulate_cvar(model, inner, p.value, x0[k], c.n, c.seed, c.jobs); }),
                      {p.value});
    }
  }

  if (want_sim) {
    for (const State& x : x0) trade.emplace_back(state_label(x), rows_by_x0[state_label(x)]);
    clock.time("write", [&] { write_tradeoff(out / "tradeoff.csv", trade); });
  }
}

}  // namespace

State parse_state(const std::string& text) {
  State s;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size() || !std::isfinite(v)) throw InputError("x0: cannot parse '" + text + "' as a state");
    s.push_back(v);
  }
  if (s.size() == 0) throw InputError("x0: empty state");
  return s;
}

bool is_pedagogical(const RunConfig& c) { return c.command == "pedagogical" || c.system == "pedagogical"; }

void validate(const RunConfig& c) {
  if (!one_of(c.command, kCommands)) throw InputError("command: unknown command '" + c.command + "'");
  if (is_pedagogical(c)) {
    for (double a : c.alphas)
      if (!(a > 0.0 && a <= 1.0)) throw ParameterError("alpha: entry " + csv::number(a) + " is outside (0, 1]");
    for (double g : c.gammas)
      if (!(g >= 0.0)) throw ParameterError("gamma: entry " + csv::number(g) + " is negative");
    if (c.u_points < 2) throw ParameterError("u_points: need at least 2 points");
    return;
  }
  if (c.system != "thermostat" && c.system != "stormwater")
    throw InputError("system: unknown system '" + c.system + "' (expected thermostat, stormwater or pedagogical)");
  if (!one_of(c.solver, kSolvers)) throw InputError("solver: unknown solver '" + c.solver + "'");
  if (c.solver == "eu") {
    if (c.thetas.empty()) throw ParameterError("theta: sweep is empty");
    for (double t : c.thetas)
      if (!(t < 0.0)) throw ParameterError("theta: entry " + csv::number(t) + " is not negative");
  }
  if (c.solver == "cvar" && c.alphas.empty()) throw ParameterError("alpha: sweep is empty");
  for (double a : c.alphas)
    if (!(a > 0.0 && a <= 1.0)) throw ParameterError("alpha: entry " + csv::number(a) + " is outside (0, 1]");
  if (c.s_resolution < 2) throw ParameterError("s_res: must be at least 2");
  if (c.n < 1) throw ParameterError("n: must be at least 1");
  if (c.jobs < 1) throw ParameterError("jobs: must be at least 1");
  if (c.command == "safe-sets" && c.r.empty()) throw ParameterError("r: safe-sets needs at least one threshold");
  if (!(c.grid_step > 0.0)) throw ParameterError("grid_step: must be positive");
}

namespace {

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string(key) + ": " + e.what());
  }
}

std::vector<double> get_numbers(const json& j, const char* key) {
  if (j.at(key).is_number()) return {j.at(key).get<double>()};
  return get_field<std::vector<double>>(j, key);
}

}  // namespace

RunConfig parse_config_json(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "command") c.command = get_field<std::string>(j, "command");
    else if (k == "system") c.system = get_field<std::string>(j, "system");
    else if (k == "solver") c.solver = get_field<std::string>(j, "solver");
    else if (k == "theta") c.thetas = get_numbers(j, "theta");
    else if (k == "alpha") c.alphas = get_numbers(j, "alpha");
    else if (k == "variant") c.variant = parse_eu_variant(get_field<std::string>(j, "variant"));
    else if (k == "s_res") c.s_resolution = get_field<int>(j, "s_res");
    else if (k == "grid_step") c.grid_step = get_field<double>(j, "grid_step");
    else if (k == "n") c.n = get_field<std::size_t>(j, "n");
    else if (k == "seed") c.seed = get_field<std::uint64_t>(j, "seed");
    else if (k == "r") c.r = get_numbers(j, "r");
    else if (k == "gamma") c.gammas = get_numbers(j, "gamma");
    else if (k == "u_points") c.u_points = get_field<std::size_t>(j, "u_points");
    else if (k == "out") c.out = get_field<std::string>(j, "out");
    else if (k == "jobs") c.jobs = get_field<std::size_t>(j, "jobs");
    else if (k == "mem_budget") c.memory_budget = get_field<std::size_t>(j, "mem_budget");
    else if (k == "x0") {
      c.x0.clear();
      for (const json& e : it.value()) {
        if (e.is_number()) {
          c.x0.push_back(State{e.get<double>()});
        } else if (e.is_array() && !e.empty() && e.size() <= kMaxAxes) {
          State s;
          for (const json& v : e) {
            if (!v.is_number()) throw InputError("x0: state components must be numbers");
            s.push_back(v.get<double>());
          }
          c.x0.push_back(s);
        } else {
          throw InputError("x0: each entry must be a number or an array of 1 to 3 numbers");
        }
      }
    } else {
      throw InputError("config: unknown field '" + k + "'");
    }
  }
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json x0 = json::array();
  for (const State& s : c.x0) x0.push_back(std::vector<double>(s.begin(), s.end()));
  const json j = {{"command", c.command},   {"system", c.system},     {"solver", c.solver},
                  {"theta", c.thetas},      {"alpha", c.alphas},      {"variant", std::string(to_string(c.variant))},
                  {"s_res", c.s_resolution}, {"grid_step", c.grid_step}, {"n", c.n},
                  {"seed", c.seed},         {"x0", x0},               {"r", c.r},
                  {"gamma", c.gammas},      {"u_points", c.u_points}, {"out", c.out},
                  {"jobs", c.jobs},         {"mem_budget", c.memory_budget}};
  return j.dump(2);
}

void apply_environment(RunConfig& config) {
  const char* env = std::getenv("RISKCTL_JOBS");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v < 1) throw ParameterError(std::string("RISKCTL_JOBS: '") + env + "' is not a positive integer");
  config.jobs = static_cast<std::size_t>(v);
}

ExitCode run(const RunConfig& config, std::ostream& err) {
  try {
    validate(config);
    const fs::path out(config.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw InputError("out: cannot create directory " + out.string() + ": " + ec.message());

    PhaseClock clock;
    json manifest;
    manifest["tool"] = "riskctl";
    manifest["version"] = kVersion;
    manifest["config"] = json::parse(config_to_json(config));
    manifest["seed"] = config.seed;
    manifest["knobs"] = knobs_json(config);
    if (is_pedagogical(config))
      run_pedagogical(config, out, clock, manifest);
    else
      run_model(config, out, clock, manifest);
    manifest["timings_seconds"] = clock.to_json();
    auto f = open_out(out / "manifest.json");
    f << manifest.dump(2) << '\n';
    return ExitCode::kOk;
  } catch (const MemoryBudgetExceeded& e) {
    err << "error: " << e.what() << " (required_bytes=" << e.required_bytes() << ")\n";
    return ExitCode::kMemory;
  } catch (const NumericalInstability& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kInstability;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kValidation;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kValidation;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kFailure;
  }
}

}  // namespace riskctl::cli
