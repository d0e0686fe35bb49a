#include "foliate/integrators.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "foliate/errors.hpp"

namespace foliate {

ButcherTableau::ButcherTableau(std::string name_, std::vector<std::vector<double>> a_,
                               std::vector<double> b_, std::vector<double> c_, int order_,
                               bool explicit_stages_)
    : name(std::move(name_)), stages(static_cast<int>(b_.size())), a(std::move(a_)),
      b(std::move(b_)), c(std::move(c_)), order(order_), explicit_stages(explicit_stages_) {
  if (static_cast<int>(a.size()) != stages || static_cast<int>(c.size()) != stages) {
    throw DimensionError("tableau " + name + ": a/b/c sizes disagree");
  }
  double bsum = 0.0;
  for (double w : b) bsum += w;
  if (std::abs(bsum - 1.0) > 1e-14) throw DomainError("tableau " + name + ": weights must sum to 1");
  for (int i = 0; i < stages; ++i) {
    if (static_cast<int>(a[i].size()) != stages) {
      throw DimensionError("tableau " + name + ": row " + std::to_string(i) + " has wrong length");
    }
    double csum = 0.0;
    for (double v : a[i]) csum += v;
    if (std::abs(csum - c[i]) > 1e-14) {
      throw DomainError("tableau " + name + ": c[" + std::to_string(i) + "] != row sum");
    }
    if (explicit_stages) {
      for (int j = i; j < stages; ++j) {
        if (a[i][j] != 0.0) {
          throw DomainError("tableau " + name + ": not strictly lower triangular");
        }
      }
    }
  }
}

const ButcherTableau& ButcherTableau::euler() {
  static const ButcherTableau tab("euler", {{0.0}}, {1.0}, {0.0}, 1);
  return tab;
}

const ButcherTableau& ButcherTableau::heun() {
  static const ButcherTableau tab("heun", {{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5}, {0.0, 1.0}, 2);
  return tab;
}

const ButcherTableau& ButcherTableau::rk4() {
  static const ButcherTableau tab("rk4",
                                  {{0.0, 0.0, 0.0, 0.0},
                                   {0.5, 0.0, 0.0, 0.0},
                                   {0.0, 0.5, 0.0, 0.0},
                                   {0.0, 0.0, 1.0, 0.0}},
                                  {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0},
                                  {0.0, 0.5, 0.5, 1.0}, 4);
  return tab;
}

const ButcherTableau& ButcherTableau::by_name(const std::string& name) {
  if (name == "euler") return euler();
  if (name == "heun") return heun();
  if (name == "rk4") return rk4();
  std::string valid;
  for (const std::string& n : names()) valid += (valid.empty() ? "" : ", ") + n;
  throw CatalogError("unknown tableau '" + name + "'; valid tableaus: " + valid);
}

std::vector<std::string> ButcherTableau::names() { return {"euler", "heun", "rk4"}; }

namespace {

void require_finite_stage(const Matrix& value, const char* what, int index) {
  if (!value.all_finite()) {
    throw DivergenceError(std::string(what) + " " + std::to_string(index) + " is not finite",
                          index);
  }
}

}  // namespace

Matrix rk_step(const ButcherTableau& tab, const StateMap& rhs, const Matrix& x, double tau) {
  if (!tab.explicit_stages) throw DomainError("rk_step: tableau must be explicit");
  if (!std::isfinite(tau)) throw DomainError("rk_step: non-finite step size");
  std::vector<Matrix> k(static_cast<std::size_t>(tab.stages));
  for (int i = 0; i < tab.stages; ++i) {
    Matrix xi = x;
    for (int j = 0; j < i; ++j) {
      if (tab.a[i][j] != 0.0) xi += (tau * tab.a[i][j]) * k[static_cast<std::size_t>(j)];
    }
    k[static_cast<std::size_t>(i)] = rhs(xi);
    require_finite_stage(k[static_cast<std::size_t>(i)], "rk stage", i);
  }
  Matrix out = x;
  for (int i = 0; i < tab.stages; ++i) {
    if (tab.b[i] != 0.0) out += (tau * tab.b[i]) * k[static_cast<std::size_t>(i)];
  }
  require_finite_stage(out, "rk update", tab.stages);
  return out;
}

Matrix implicit_midpoint_step(const StateMap& rhs, const Matrix& x, double tau,
                              const SolveConfig& cfg) {
  if (cfg.tol <= 0.0 || cfg.max_iter < 1) throw DomainError("implicit midpoint: bad solve config");
  Matrix cur = x;
  double residual = 0.0;
  int polish = 0;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    Matrix next = x + tau * rhs(0.5 * (x + cur));
    require_finite_stage(next, "midpoint iterate", iter);
    residual = (next - cur).max_abs();
    cur = std::move(next);
    if (residual <= cfg.tol) {
      // Two settling sweeps; the iterate lands on the floating-point fixed
      // point so the update is reproducible across nearby stopping counts.
      if (++polish > 2) return cur;
    } else {
      polish = 0;
    }
  }
  if (residual <= cfg.tol) return cur;
  throw NonconvergenceError("implicit midpoint: no convergence in " +
                                std::to_string(cfg.max_iter) +
                                " iterations (residual " + std::to_string(residual) + ")",
                            residual);
}

Matrix lie_euler_step(const FoliateSystem& sys, const Matrix& x, double tau) {
  AlgebraElement a = sys.tangent_gen(x);
  Matrix moved = x + tau * sys.invariant_field(x);
  return sys.action.evaluate_exp(tau * a.mat(), moved);
}

Matrix rkmk_step(const FoliateSystem& sys, const ButcherTableau& tab, const Matrix& x,
                 double tau) {
  if (!tab.explicit_stages) throw DomainError("rkmk_step: tableau must be explicit");
  const GroupAction& action = sys.action;
  int n = action.n();
  std::vector<Matrix> km(static_cast<std::size_t>(tab.stages));  // invariant-part stages
  std::vector<Matrix> kg(static_cast<std::size_t>(tab.stages));  // algebra stages
  for (int i = 0; i < tab.stages; ++i) {
    Matrix mi = x;
    Matrix sigma_i(n, n);
    for (int j = 0; j < i; ++j) {
      if (tab.a[i][j] == 0.0) continue;
      mi += (tau * tab.a[i][j]) * km[static_cast<std::size_t>(j)];
      sigma_i += (tau * tab.a[i][j]) * kg[static_cast<std::size_t>(j)];
    }
    Matrix stage_state = action.evaluate_exp(sigma_i, mi);
    kg[static_cast<std::size_t>(i)] =
        dexpinv(sigma_i, sys.tangent_gen(stage_state).mat(), tab.order);
    km[static_cast<std::size_t>(i)] = sys.invariant_field(mi);
    require_finite_stage(km[static_cast<std::size_t>(i)], "rkmk stage", i);
    require_finite_stage(kg[static_cast<std::size_t>(i)], "rkmk algebra stage", i);
  }
  Matrix m1 = x;
  Matrix sigma(n, n);
  for (int i = 0; i < tab.stages; ++i) {
    if (tab.b[i] == 0.0) continue;
    m1 += (tau * tab.b[i]) * km[static_cast<std::size_t>(i)];
    sigma += (tau * tab.b[i]) * kg[static_cast<std::size_t>(i)];
  }
  return action.evaluate_exp(sigma, m1);
}

namespace {

constexpr double kProjectionRankTol = 1e-10;

Matrix leaf_jacobian_of(const PlainSystem& sys, const Matrix& x) {
  return sys.leaf_jacobian ? sys.leaf_jacobian(x) : leaf_jacobian_fd(sys.leaf_invariant, x);
}

// Smallest absolute pivot of a partial-pivoting LU; 0 for an exactly
// singular matrix.
double min_abs_pivot(Matrix g) {
  int n = g.rows();
  double smallest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(g(i, k)) > std::abs(g(p, k))) p = i;
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(g(k, j), g(p, j));
    }
    double pivot = std::abs(g(k, k));
    if (pivot == 0.0) return 0.0;
    smallest = std::min(smallest, pivot);
    for (int i = k + 1; i < n; ++i) {
      double l = g(i, k) / g(k, k);
      for (int j = k + 1; j < n; ++j) g(i, j) -= l * g(k, j);
    }
  }
  return smallest;
}

void require_full_rank(const Matrix& gram) {
  if (min_abs_pivot(gram) <= kProjectionRankTol * (1.0 + gram.max_abs())) {
    throw SingularLeafError("projection_step: leaf map drops rank at the working point");
  }
}

}  // namespace

ProjectionResult projection_step(const PlainSystem& sys, const Stepper& inner,
                                 const Stepper& reduced, const Matrix& x,
                                 const std::vector<double>& leaf_n, double tau,
                                 const SolveConfig& cfg) {
  if (!sys.leaf_invariant) throw DomainError("projection_step: system has no leaf map");
  if (cfg.tol <= 0.0 || cfg.max_iter < 1) throw DomainError("projection_step: bad solve config");
  int k = static_cast<int>(leaf_n.size());

  // Step 1: reduced update, a function of leaf_n alone.
  Matrix target_vec = reduced(Matrix::column(leaf_n), tau);
  std::vector<double> target(target_vec.data().begin(), target_vec.data().end());

  // Step 2: predictor on the full field.
  Matrix predicted = inner(x, tau);

  // Step 3: orthogonal projection x = predicted + dI(predicted)^T mu onto
  // I = target, Newton iteration on mu. The leaf map must have full rank at
  // the working point.
  Matrix jac_pred = leaf_jacobian_of(sys, predicted);  // k x m
  Matrix jac_pred_t = jac_pred.transpose();
  require_full_rank(jac_pred * jac_pred_t);
  Matrix mu(k, 1);
  Matrix cur = predicted;
  double residual = 0.0;
  for (int iter = 0; iter <= cfg.max_iter; ++iter) {
    std::vector<double> leaf_cur = sys.leaf_invariant(cur);
    Matrix f(k, 1);
    residual = 0.0;
    for (int i = 0; i < k; ++i) {
      f(i, 0) = leaf_cur[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)];
      residual = std::max(residual, std::abs(f(i, 0)));
    }
    if (residual <= cfg.tol) {
      return {cur, std::move(target)};
    }
    if (iter == cfg.max_iter) break;
    Matrix jac_cur = leaf_jacobian_of(sys, cur);
    Matrix gram = jac_cur * jac_pred_t;  // k x k
    require_full_rank(gram);
    mu -= solve(gram, f);
    Matrix shift = jac_pred_t * mu;
    cur = predicted;
    for (int c = 0; c < cur.size(); ++c) cur[c] += shift[c];
  }
  throw NonconvergenceError("projection_step: Newton stalled (residual " +
                                std::to_string(residual) + ")",
                            residual);
}

Matrix discrete_gradient_step(const GradientSystem& sys, const Matrix& x, double tau,
                              const SolveConfig& cfg) {
  if (cfg.tol <= 0.0 || cfg.max_iter < 1) throw DomainError("discrete gradient: bad solve config");
  if (tau == 0.0) return x;
  double leaf_x = sys.leaf_value(x);
  Matrix cur = x;
  double residual = 0.0;
  int polish = 0;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    Matrix mid = 0.5 * (x + cur);
    Matrix diff = cur - x;
    Matrix gbar = sys.leaf_gradient(mid);
    double diff_sq = dot(diff, diff);
    if (diff_sq > 0.0) {
      double leaf_cur = sys.leaf_value(cur);
      double correction = (leaf_cur - leaf_x - dot(gbar, diff)) / diff_sq;
      gbar += correction * diff;
    }
    double gnorm_sq = dot(gbar, gbar);
    if (gnorm_sq < 1e-28) {
      throw SingularLeafError("discrete gradient: leaf gradient vanishes");
    }
    double hbar = sys.reduced_rhs(0.5 * (leaf_x + sys.leaf_value(cur)));
    Matrix next = x + tau * (sys.skew_operator(mid) * gbar + (hbar / gnorm_sq) * gbar);
    require_finite_stage(next, "discrete gradient iterate", iter);
    residual = (next - cur).max_abs();
    cur = std::move(next);
    if (residual <= cfg.tol) {
      if (++polish > 2) return cur;
    } else {
      polish = 0;
    }
  }
  if (residual <= cfg.tol) return cur;
  throw NonconvergenceError("discrete gradient: no convergence in " +
                                std::to_string(cfg.max_iter) +
                                " iterations (residual " + std::to_string(residual) + ")",
                            residual);
}

Matrix splitting_step(std::span<const Stepper> parts, const Matrix& x, double tau, bool strang) {
  Matrix cur = x;
  if (!strang) {
    for (const Stepper& part : parts) cur = part(cur, tau);
    return cur;
  }
  for (const Stepper& part : parts) cur = part(cur, 0.5 * tau);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) cur = (*it)(cur, 0.5 * tau);
  return cur;
}

Matrix exact_linear_step(const Matrix& lambda, const Matrix& x, double tau) {
  if (!lambda.square() || lambda.rows() != x.rows()) {
    throw DimensionError("exact_linear_step: matrix does not match state");
  }
  return mat_exp_matrix(tau * lambda) * x;
}

Stepper make_rk_stepper(const ButcherTableau& tab, const PlainSystem& sys) {
  return {tab.name, tab.order, false,
          [tab, rhs = sys.rhs](const Matrix& x, double tau) { return rk_step(tab, rhs, x, tau); }};
}

Stepper make_implicit_midpoint_stepper(const PlainSystem& sys, const SolveConfig& cfg) {
  return {"midpoint", 2, false, [rhs = sys.rhs, cfg](const Matrix& x, double tau) {
            return implicit_midpoint_step(rhs, x, tau, cfg);
          }};
}

Stepper make_lie_euler_stepper(const FoliateSystem& sys) {
  return {"lie-euler", 1, true,
          [sys](const Matrix& x, double tau) { return lie_euler_step(sys, x, tau); }};
}

Stepper make_rkmk_stepper(const FoliateSystem& sys, const ButcherTableau& tab) {
  return {"rkmk" + std::to_string(tab.order), tab.order, true,
          [sys, tab](const Matrix& x, double tau) { return rkmk_step(sys, tab, x, tau); }};
}

Stepper make_projection_stepper(const PlainSystem& sys, const ButcherTableau& tab,
                                const SolveConfig& cfg) {
  if (!sys.leaf_invariant || !sys.reduced_rhs) {
    throw DomainError("projection stepper: system needs a leaf map and reduced dynamics");
  }
  Stepper inner = make_rk_stepper(tab, sys);
  PlainSystem reduced_sys;
  reduced_sys.name = sys.name + "-reduced";
  reduced_sys.state_rows = sys.leaf_dim;
  reduced_sys.state_cols = 1;
  reduced_sys.rhs = [h = sys.reduced_rhs](const Matrix& v) {
    std::vector<double> value(v.data().begin(), v.data().end());
    return Matrix::column(h(value));
  };
  Stepper reduced = make_rk_stepper(tab, reduced_sys);
  return {"projection", tab.order, true,
          [sys, inner, reduced, cfg](const Matrix& x, double tau) {
            return projection_step(sys, inner, reduced, x, sys.leaf_invariant(x), tau, cfg).state;
          }};
}

Stepper make_discrete_gradient_stepper(const GradientSystem& sys, const SolveConfig& cfg) {
  return {"discrete-gradient", 2, true, [sys, cfg](const Matrix& x, double tau) {
            return discrete_gradient_step(sys, x, tau, cfg);
          }};
}

Stepper make_splitting_stepper(std::vector<Stepper> parts, std::string name, int order,
                               bool strang, bool foliate) {
  return {std::move(name), order, foliate,
          [parts = std::move(parts), strang](const Matrix& x, double tau) {
            return splitting_step(parts, x, tau, strang);
          }};
}

Stepper make_exact_linear_stepper(Matrix lambda, std::string name) {
  return {std::move(name), 0, false, [lambda = std::move(lambda)](const Matrix& x, double tau) {
            return exact_linear_step(lambda, x, tau);
          }};
}

}  // namespace foliate
