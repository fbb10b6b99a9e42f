#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "riskctl/eu_dp.hpp"
#include "riskctl/grid.hpp"
#include "riskctl/parallel.hpp"

namespace riskctl::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kMemory = 3, kInstability = 4 };

struct RunConfig {
  std::string command = "solve";  // solve | simulate | tradeoff | safe-sets | pedagogical
  std::string system = "thermostat";
  std::string solver = "eu";      // eu | cvar | risk-neutral
  std::vector<double> thetas;
  std::vector<double> alphas;
  EuVariant variant = EuVariant::kRaw;
  int s_resolution = 65;
  double grid_step = 0.1;  // stormwater only
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::vector<State> x0;
  std::vector<double> r;
  std::vector<double> gammas{0.0, 1.0, 5.0};  // pedagogical
  std::size_t u_points = 101;                 // pedagogical grid on [0, 0.25]
  std::string out = "out";
  std::size_t jobs = default_jobs();
  std::size_t memory_budget = std::size_t{8} << 30;
};

/// The pedagogical example is selected by command or by system name.
bool is_pedagogical(const RunConfig& config);

/// Applies RISKCTL_JOBS, which takes precedence over the configured parallelism.
void apply_environment(RunConfig& config);

/// Throws ParameterError / InputError naming the offending field.
void validate(const RunConfig& config);

/// Reads a JSON run configuration; fields absent from the document keep the values in `base`.
RunConfig parse_config_json(const std::string& text, RunConfig base = {});
std::string config_to_json(const RunConfig& config);

/// "2,2" -> State{2, 2}
State parse_state(const std::string& text);

/// Runs one configuration, writing artifacts under config.out. Messages go to `err`.
ExitCode run(const RunConfig& config, std::ostream& err);

}  // namespace riskctl::cli
