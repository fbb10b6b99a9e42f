#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "riskctl/system_model.hpp"

namespace riskctl {

/// Probabilities on a fixed support matching mean, variance and skewness exactly.
/// Chosen as the closest table (least squares) to the uniform one, with negative
/// entries pinned to zero until all are non-negative. InputError when infeasible.
DisturbanceTable moment_matched_table(std::vector<double> support, double mean, double variance, double skewness);

namespace thermostat {

inline constexpr double kTemperatureShift = 32.0;  // b
inline constexpr double kCapacitance = 2.0;        // C
inline constexpr double kEfficiency = 0.7;         // eta
inline constexpr double kPower = 14.0;             // P
inline constexpr double kResistance = 2.0;         // R
inline constexpr double kStep = 5.0 / 60.0;        // hours
inline constexpr int kHorizon = 12;

double decay();  // exp(-kStep / (kCapacitance * kResistance))
double next_state(double x, double u, double w);
double cost(double x);  // max(x - 21, 20 - x)

/// Right-skewed 10-atom table on {-0.15, -0.10, ..., 0.30} with mean 0,
/// standard deviation 0.08 and skewness 1.
DisturbanceTable default_disturbance();

}  // namespace thermostat

struct ThermostatOptions {
  std::optional<DisturbanceTable> disturbance;
};

SystemModel make_thermostat(const ThermostatOptions& options = {});

namespace stormwater {

inline constexpr double kArea1 = 30000.0;  // ft^2
inline constexpr double kArea2 = 10000.0;
inline constexpr double kDischarge = 0.61;
inline constexpr double kGravity = 32.2;       // ft/s^2
inline constexpr double kMaxLevel1 = 5.5;      // ft
inline constexpr double kMaxLevel2 = 7.0;
inline constexpr double kOutletElevation1 = 3.0;
inline constexpr double kOutletElevation2 = 4.0;
inline constexpr double kOutlets1 = 3.0;
inline constexpr double kOutlets2 = 1.0;
inline constexpr double kOutletRadius1 = 0.25;
inline constexpr double kOutletRadius2 = 0.375;
inline constexpr double kStormRadius = 1.0 / 3.0;
inline constexpr double kStormElevation = 1.0;
inline constexpr double kPumpElevation = 1.0;
inline constexpr double kPumpBand = 1.0 / 12.0;  // epsilon
inline constexpr double kPumpRate = 10.0;        // cfs
inline constexpr double kStepSeconds = 300.0;
inline constexpr int kHorizon = 48;

/// Maximum outflow through an orifice of radius r at elevation z in a tank filled to k_max.
double max_outflow(double radius, double elevation, double k_max);
/// Regulated outflow: linear from 0 at the outlet elevation to q_max at k_max.
double regulated_outflow(double q_max, double elevation, double k_max, double level);

double combined_sewer_flow(int tank, double level);  // q_cso,i, tank in {1, 2}
double storm_sewer_flow(double level2);              // q_storm
double cost(const State& x);                         // q_cso * 300 s * 0.01

/// Moment-matched 10-atom table on {2.0, 2.5, ..., 6.5} cfs: mean 4.0, variance 1.2, skewness 0.72.
DisturbanceTable default_disturbance();

}  // namespace stormwater

/// Pump flow from tank 2 to tank 1 (negative: tank 1 to tank 2) with the start-up ramp.
double pump_rate(const State& x, double u);

struct StormwaterOptions {
  double grid_step = 0.1;  // ft, must divide both maximum levels
  std::optional<DisturbanceTable> disturbance;
};

SystemModel make_stormwater(const StormwaterOptions& options = {});

/// Equiprobable 1001-atom table of a standardized skew-normal, rescaled to mean 0 and
/// variance 1 exactly and with shape chosen so the table's skewness is -0.5.
struct PedagogicalDisturbance {
  std::vector<double> values;
  double shape = 0.0;
  double m3 = 0.0;  // E W^3
  double m4 = 0.0;  // E W^4
};

const PedagogicalDisturbance& pedagogical_disturbance();

struct PedagogicalRow {
  double u = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> certainty_equivalent;  // per gamma
  std::vector<double> cvar;                  // per alpha
};

/// Statistics of phi(u, W) = u^2 + (W + u)^2 over a grid of u.
std::vector<PedagogicalRow> pedagogical_curves(const std::vector<double>& u_grid, const std::vector<double>& gammas,
                                               const std::vector<double>& alphas);

/// Builds `thermostat` or `stormwater` by name with default options.
SystemModel make_system(std::string_view name);

}  // namespace riskctl
