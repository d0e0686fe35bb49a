#include "foliate/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "foliate/errors.hpp"
#include "foliate/systems.hpp"

namespace foliate {

Trajectory integrate(const Stepper& stepper, const Matrix& x0, double tau, int steps,
                     const LeafMap& leaf, const std::string& system_name) {
  if (steps < 0) throw DomainError("integrate: steps must be >= 0");
  Trajectory traj;
  traj.method = stepper.method;
  traj.system = system_name;
  traj.tau = tau;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  Matrix x = x0;
  for (int k = 0; k <= steps; ++k) {
    traj.times.push_back(k * tau);
    if (leaf) traj.leaf_values.push_back(leaf(x));
    traj.states.push_back(x);
    if (k == steps) break;
    try {
      x = stepper(x, tau);
    } catch (const DivergenceError& e) {
      throw DivergenceError("step " + std::to_string(k) + ": " + e.what(), k);
    } catch (const NonconvergenceError& e) {
      throw NonconvergenceError("step " + std::to_string(k) + ": " + e.what(), e.residual);
    }
  }
  return traj;
}

DriftReport leaf_drift(const Trajectory& traj, const LeafUpdate& reduced_update) {
  DriftReport report;
  if (traj.leaf_values.size() < 2) return report;
  for (std::size_t n = 0; n + 1 < traj.leaf_values.size(); ++n) {
    std::vector<double> predicted = reduced_update(traj.leaf_values[n]);
    double drift = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      drift = std::max(drift, std::abs(traj.leaf_values[n + 1][i] - predicted[i]));
    }
    report.per_step_drift.push_back(drift);
    report.max_drift = std::max(report.max_drift, drift);
  }
  return report;
}

std::vector<double> leaf_spread(std::span<const Trajectory> bundle) {
  if (bundle.empty()) return {};
  std::size_t length = bundle.front().leaf_values.size();
  std::vector<double> spread(length, 0.0);
  for (std::size_t step = 0; step < length; ++step) {
    for (std::size_t i = 0; i < bundle.size(); ++i) {
      for (std::size_t j = i + 1; j < bundle.size(); ++j) {
        const auto& a = bundle[i].leaf_values[step];
        const auto& b = bundle[j].leaf_values[step];
        for (std::size_t c = 0; c < a.size(); ++c) {
          spread[step] = std::max(spread[step], std::abs(a[c] - b[c]));
        }
      }
    }
  }
  return spread;
}

std::vector<Matrix> co_leaf_bundle(const GroupAction& action, const Matrix& base, int count,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> bundle;
  bundle.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    bundle.push_back(action.evaluate(action.random_group_element(rng), base));
  }
  return bundle;
}

double fit_loglog_slope(std::span<const double> taus, std::span<const double> errors) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = static_cast<int>(taus.size());
  for (int i = 0; i < n; ++i) {
    double lx = std::log(taus[i]);
    double ly = std::log(errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport convergence_order(const Stepper& stepper, const StateMap& full_rhs,
                                    const Matrix& x0, double t_final,
                                    std::span<const double> tau_list) {
  if (tau_list.size() < 3) throw DomainError("convergence_order: need at least 3 step sizes");
  double tau_min = tau_list.back();
  for (std::size_t i = 0; i < tau_list.size(); ++i) {
    if (tau_list[i] <= 0.0) throw DomainError("convergence_order: step sizes must be positive");
    if (i > 0 && tau_list[i] >= tau_list[i - 1]) {
      throw DomainError("convergence_order: step sizes must decrease");
    }
    tau_min = std::min(tau_min, tau_list[i]);
    double ratio = t_final / tau_list[i];
    if (std::abs(ratio - std::round(ratio)) > 1e-9) {
      throw DomainError("convergence_order: T must be an integer multiple of every step size");
    }
  }

  // Reference: rk4 on the full field at tau_min / 16.
  double tau_ref = tau_min / 16.0;
  int ref_steps = static_cast<int>(std::llround(t_final / tau_ref));
  Matrix reference = x0;
  for (int k = 0; k < ref_steps; ++k) {
    reference = rk_step(ButcherTableau::rk4(), full_rhs, reference, tau_ref);
  }

  ConvergenceReport report;
  for (double tau : tau_list) {
    int steps = static_cast<int>(std::llround(t_final / tau));
    Matrix x = x0;
    for (int k = 0; k < steps; ++k) x = stepper(x, tau);
    report.taus.push_back(tau);
    report.errors.push_back((x - reference).norm_fro());
  }
  if (report.errors.front() < 1e-13) {
    throw PrecisionFloorError(
        "convergence_order: error is at round-off already (" +
        std::to_string(report.errors.front()) + " at the largest step size)");
  }
  report.local_slopes.resize(report.taus.size());
  for (std::size_t i = 1; i < report.taus.size(); ++i) {
    report.local_slopes[i] = std::log(report.errors[i - 1] / report.errors[i]) /
                             std::log(report.taus[i - 1] / report.taus[i]);
  }
  if (report.local_slopes.size() > 1) report.local_slopes[0] = report.local_slopes[1];
  report.slope = fit_loglog_slope(report.taus, report.errors);
  return report;
}

MidpointCoefficientReport midpoint_coefficient(const Matrix& x0, std::span<const double> tau_list,
                                               const SolveConfig& cfg) {
  if (x0.size() != 2) throw DomainError("midpoint_coefficient: need a planar initial point");
  double r2 = x0[0] * x0[0] + x0[1] * x0[1];
  if (r2 == 0.0) throw DomainError("midpoint_coefficient: initial point must not be the origin");
  if (tau_list.size() < 2) throw DomainError("midpoint_coefficient: need at least 2 step sizes");

  StateMap rhs = builtin_system("eq2").plain.rhs;
  MidpointCoefficientReport report;
  for (double tau : tau_list) {
    Matrix x1 = implicit_midpoint_step(rhs, x0, tau, cfg);
    double r2_new = x1[0] * x1[0] + x1[1] * x1[1];
    double c = (r2_new - r2 * (1.0 + 2.0 * tau + 2.0 * tau * tau)) / (r2 * tau * tau * tau);
    report.taus.push_back(tau);
    report.values.push_back(c);
  }
  // c(tau) = c* + O(tau): first-order Richardson from the two smallest taus.
  std::size_t m = report.taus.size();
  double t1 = report.taus[m - 2], c1 = report.values[m - 2];
  double t2 = report.taus[m - 1], c2 = report.values[m - 1];
  report.extrapolated = (t1 * c2 - t2 * c1) / (t1 - t2);
  return report;
}

Figure2Data figure2_experiment(double tau, int steps, int n_ics, double radius) {
  BuiltinSystem eq1 = builtin_system("eq1");
  Stepper lie = make_lie_euler_stepper(*eq1.foliate);
  Stepper euler = make_rk_stepper(ButcherTableau::euler(), eq1.plain);

  Figure2Data data;
  for (int j = 0; j < n_ics; ++j) {
    double angle = 2.0 * M_PI * j / n_ics;
    Matrix ic = Matrix::column({radius * std::cos(angle), radius * std::sin(angle)});
    data.lie_euler.push_back(integrate(lie, ic, tau, steps, eq1.plain.leaf_invariant, "eq1"));
    data.euler.push_back(integrate(euler, ic, tau, steps, eq1.plain.leaf_invariant, "eq1"));
  }
  data.lie_spread = leaf_spread(data.lie_euler);
  data.euler_spread = leaf_spread(data.euler);
  return data;
}

Figure1Data figure1_fields(const GridSpec& grid) {
  Figure1Data data;
  data.systems = {"eq1", "fig1-middle", "fig1-bottom"};
  const double dot_times[3] = {0.0, 0.5, 1.0};
  const int dots_per_circle = 8;
  const double dot_radius = 2.0;

  for (const std::string& name : data.systems) {
    BuiltinSystem sys = builtin_system(name);
    std::vector<FieldSample> samples;
    for (int iy = 0; iy < grid.ny; ++iy) {
      for (int ix = 0; ix < grid.nx; ++ix) {
        double x = grid.nx == 1 ? grid.xmin
                                : grid.xmin + (grid.xmax - grid.xmin) * ix / (grid.nx - 1);
        double y = grid.ny == 1 ? grid.ymin
                                : grid.ymin + (grid.ymax - grid.ymin) * iy / (grid.ny - 1);
        Matrix v = sys.plain.rhs(Matrix::column({x, y}));
        samples.push_back({x, y, v[0], v[1]});
      }
    }
    data.fields.push_back(std::move(samples));

    // Reference flow dots from a fine rk4 run.
    std::vector<FlowDot> dots;
    const double tau_ref = 1.0 / 1024.0;
    Stepper ref = make_rk_stepper(ButcherTableau::rk4(), sys.plain);
    for (int j = 0; j < dots_per_circle; ++j) {
      double angle = 2.0 * M_PI * j / dots_per_circle;
      Matrix x = Matrix::column({dot_radius * std::cos(angle), dot_radius * std::sin(angle)});
      double t = 0.0;
      for (double target : dot_times) {
        while (t < target - 0.5 * tau_ref) {
          x = ref(x, tau_ref);
          t += tau_ref;
        }
        dots.push_back({j, target, x[0], x[1]});
      }
    }
    data.dots.push_back(std::move(dots));
  }
  return data;
}

}  // namespace foliate
