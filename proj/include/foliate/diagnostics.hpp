#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "foliate/foliation.hpp"
#include "foliate/integrators.hpp"

namespace foliate {

/// A fixed-step discrete orbit plus the leaf-invariant series along it.
struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::vector<std::vector<double>> leaf_values;  // empty when no leaf map given
  std::string method;
  std::string system;
  double tau = 0.0;

  int steps() const { return static_cast<int>(states.size()) - 1; }
};

/// Repeated stepping from x0; leaf values recorded when a leaf map is given.
/// Stepper failures are rethrown with the failing step index.
Trajectory integrate(const Stepper& stepper, const Matrix& x0, double tau, int steps,
                     const LeafMap& leaf = {}, const std::string& system_name = "");

/// Per-step leaf drift of a trajectory against a nominal reduced update
/// Phi: I_n -> I_{n+1} (the map the method is supposed to realize on leaf
/// values). spread_across_leaf is filled by bundle experiments, not here.
struct DriftReport {
  std::vector<double> per_step_drift;
  double max_drift = 0.0;
  double spread_across_leaf = 0.0;
};

using LeafUpdate = std::function<std::vector<double>(const std::vector<double>&)>;

DriftReport leaf_drift(const Trajectory& traj, const LeafUpdate& reduced_update);

/// Per-step max pairwise difference (infinity norm over components) of the
/// leaf values across a bundle of trajectories started on one leaf.
std::vector<double> leaf_spread(std::span<const Trajectory> bundle);

/// `count` points on the leaf through `base`, produced by acting with random
/// group elements; leaf membership is exact by construction.
std::vector<Matrix> co_leaf_bundle(const GroupAction& action, const Matrix& base, int count,
                                   std::uint64_t seed);

/// Global error at time T against a fine reference (rk4 at tau_min/16) for
/// each step size, with the fitted log-log slope. Throws PrecisionFloorError
/// when the error at the largest step size is already below 1e-13, and
/// DomainError unless T is an integer multiple of every step size.
struct ConvergenceReport {
  std::vector<double> taus;
  std::vector<double> errors;
  std::vector<double> local_slopes;  // between consecutive step sizes; first entry repeats
  double slope = 0.0;
};

ConvergenceReport convergence_order(const Stepper& stepper, const StateMap& full_rhs,
                                    const Matrix& x0, double t_final,
                                    std::span<const double> tau_list);

/// Least-squares slope of log(error) against log(tau); invariant under
/// rescaling the errors by a positive constant.
double fit_loglog_slope(std::span<const double> taus, std::span<const double> errors);

/// The tau^3 coefficient in the implicit-midpoint radius expansion
///   r'^2 = r^2 (1 + 2 tau + 2 tau^2 + c tau^3) + O(tau^4)
/// measured on the exponential-swirl planar system (eq2) and Richardson-
/// extrapolated to tau -> 0 from the two smallest step sizes. The limit is
/// (3 - y0^2)/2; its dependence on the initial angle is exactly what keeps
/// the midpoint rule from being foliate for this quadratic foliation.
struct MidpointCoefficientReport {
  std::vector<double> taus;
  std::vector<double> values;
  double extrapolated = 0.0;
};

MidpointCoefficientReport midpoint_coefficient(const Matrix& x0, std::span<const double> tau_list,
                                               const SolveConfig& cfg = {1e-14, 100});

/// Bundle experiment on eq1: `n_ics` points equally spaced on a circle,
/// advanced by the foliate Lie-Euler method and by explicit Euler, with the
/// per-step leaf spread of each method.
struct Figure2Data {
  std::vector<Trajectory> lie_euler;
  std::vector<Trajectory> euler;
  std::vector<double> lie_spread;
  std::vector<double> euler_spread;
};

Figure2Data figure2_experiment(double tau = 0.1, int steps = 4, int n_ics = 20,
                               double radius = 2.0);

/// Vector-field samples of the three planar catalogue fields on a grid, plus
/// reference flow positions ("dots") at t = 0, 0.5, 1 from a fine rk4 run.
struct FieldSample {
  double x, y, u, v;
};

struct FlowDot {
  int ic;
  double t, x, y;
};

struct GridSpec {
  int nx = 21;
  int ny = 21;
  double xmin = -2.0, xmax = 2.0;
  double ymin = -2.0, ymax = 2.0;
};

struct Figure1Data {
  std::vector<std::string> systems;
  std::vector<std::vector<FieldSample>> fields;  // one block per system
  std::vector<std::vector<FlowDot>> dots;
};

Figure1Data figure1_fields(const GridSpec& grid = {});

}  // namespace foliate
