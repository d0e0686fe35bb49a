#include "foliate/systems.hpp"

#include <cmath>

#include "foliate/errors.hpp"

namespace foliate {

namespace {

double param(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int int_param(const Params& p, const std::string& key, double fallback) {
  double v = param(p, key, fallback);
  int n = static_cast<int>(std::lround(v));
  if (std::abs(v - n) > 1e-9) throw DomainError("parameter '" + key + "' must be an integer");
  return n;
}

Params merged(const Params& defaults, const Params& overrides, const std::string& system,
              std::initializer_list<const char*> extra_allowed = {}) {
  Params out = defaults;
  for (const auto& [key, value] : overrides) {
    bool known = defaults.count(key) > 0;
    for (const char* k : extra_allowed) known = known || key == k;
    if (!known) throw DomainError("system '" + system + "' has no parameter '" + key + "'");
    out[key] = value;
  }
  return out;
}

const Matrix& rotation_generator() {
  static const Matrix j(2, 2, {0.0, -1.0, 1.0, 0.0});
  return j;
}

// --- planar families (circular leaves of the SO(2) rotation action) -------

// Shared structure: tangent coefficient omega(x) times the rotation
// generator, radial invariant part rho(r^2) * x, leaf value r^2.
FoliateSystem planar_system(std::string name, std::function<double(double, double)> omega,
                            std::function<double(double)> radial,
                            std::function<double(double)> reduced, Matrix ic) {
  FoliateSystem sys;
  sys.name = std::move(name);
  sys.state_rows = 2;
  sys.state_cols = 1;
  sys.action = GroupAction::rotation_so2();
  sys.tangent_gen = [omega](const Matrix& v) {
    return AlgebraElement(omega(v[0], v[1]) * rotation_generator(), Algebra::so);
  };
  sys.invariant_field = [radial](const Matrix& v) {
    double r2 = v[0] * v[0] + v[1] * v[1];
    return Matrix::column({radial(r2) * v[0], radial(r2) * v[1]});
  };
  sys.leaf_dim = 1;
  sys.leaf_invariant = [](const Matrix& v) {
    return std::vector<double>{v[0] * v[0] + v[1] * v[1]};
  };
  sys.reduced_rhs = [reduced](const std::vector<double>& leaf) {
    return std::vector<double>{reduced(leaf[0])};
  };
  sys.leaf_jacobian = [](const Matrix& v) {
    Matrix jac(1, 2);
    jac(0, 0) = 2.0 * v[0];
    jac(0, 1) = 2.0 * v[1];
    return jac;
  };
  sys.default_ic = std::move(ic);
  return sys;
}

BuiltinSystem build_eq1(const Params& params) {
  BuiltinSystem out;
  out.name = "eq1";
  out.params = params;
  out.foliate = planar_system(
      "eq1", [](double x, double) { return -x; }, [](double r2) { return 1.0 - r2; },
      [](double i) { return 2.0 * i * (1.0 - i); }, Matrix::column({2.0, 0.0}));
  out.plain = to_plain(*out.foliate);

  // Gradient form on the half-square-radius leaf value: I = (x^2+y^2)/2,
  // tangent part A(x) grad I with A = [[0, x], [-x, 0]].
  GradientSystem grad;
  grad.name = "eq1";
  grad.dim = 2;
  grad.skew_operator = [](const Matrix& v) {
    return Matrix(2, 2, {0.0, v[0], -v[0], 0.0});
  };
  grad.leaf_value = [](const Matrix& v) { return 0.5 * (v[0] * v[0] + v[1] * v[1]); };
  grad.leaf_gradient = [](const Matrix& v) { return Matrix::column({v[0], v[1]}); };
  grad.reduced_rhs = [](double i) { return 2.0 * i * (1.0 - 2.0 * i); };
  grad.default_ic = Matrix::column({2.0, 0.0});
  out.gradient = std::move(grad);
  return out;
}

BuiltinSystem build_eq2(const Params& params) {
  BuiltinSystem out;
  out.name = "eq2";
  out.params = params;
  // Polar form r' = r, theta' = r sin(theta); the tangent coefficient is
  // r sin(theta) = y and the invariant part is the radial field (x, y).
  out.foliate = planar_system(
      "eq2", [](double, double y) { return y; }, [](double) { return 1.0; },
      [](double i) { return 2.0 * i; }, Matrix::column({0.0, 1.0}));
  out.plain = to_plain(*out.foliate);
  return out;
}

BuiltinSystem build_fig1_middle(const Params& params) {
  BuiltinSystem out;
  out.name = "fig1-middle";
  out.params = params;
  out.foliate = planar_system(
      "fig1-middle", [](double x, double) { return -x; }, [](double) { return 0.0; },
      [](double) { return 0.0; }, Matrix::column({2.0, 0.0}));
  out.plain = to_plain(*out.foliate);
  return out;
}

BuiltinSystem build_fig1_bottom(const Params& params) {
  BuiltinSystem out;
  out.name = "fig1-bottom";
  out.params = params;
  out.foliate = planar_system(
      "fig1-bottom",
      [](double x, double y) { return -(1.0 + (x * x + y * y) / 5.0); },
      [](double r2) { return 1.0 - r2; }, [](double i) { return 2.0 * i * (1.0 - i); },
      Matrix::column({2.0, 0.0}));
  out.plain = to_plain(*out.foliate);
  return out;
}

// --- Lorenz at b = 2 sigma -------------------------------------------------

BuiltinSystem build_lorenz(const Params& raw) {
  double sigma = param(raw, "sigma", 10.0);
  double r = param(raw, "r", 28.0);
  double b = param(raw, "b", 2.0 * sigma);
  BuiltinSystem out;
  out.name = "lorenz";
  out.params = {{"sigma", sigma}, {"r", r}, {"b", b}};

  PlainSystem sys;
  sys.name = "lorenz";
  sys.state_rows = 3;
  sys.state_cols = 1;
  sys.rhs = [sigma, r, b](const Matrix& v) {
    double x = v[0], y = v[1], z = v[2];
    return Matrix::column({sigma * y - sigma * x, -y - x * z - r * x, x * y - b * z});
  };
  sys.default_ic = Matrix::column({1.0, 1.0, 1.0});
  if (b == 2.0 * sigma) {
    // Quadratic leaf function, decays at rate 2 sigma along the flow.
    sys.leaf_dim = 1;
    sys.leaf_invariant = [sigma](const Matrix& v) {
      return std::vector<double>{v[0] * v[0] - 2.0 * sigma * v[2]};
    };
    sys.reduced_rhs = [sigma](const std::vector<double>& leaf) {
      return std::vector<double>{-2.0 * sigma * leaf[0]};
    };
    sys.leaf_jacobian = [sigma](const Matrix& v) {
      Matrix jac(1, 3);
      jac(0, 0) = 2.0 * v[0];
      jac(0, 2) = -2.0 * sigma;
      return jac;
    };
  }
  out.plain = sys;

  // Splitting: the leaf-tangent part keeps the quadratic leaf value
  // constant, the remainder is linear and solved exactly.
  PlainSystem tangent = sys;
  tangent.name = "lorenz-tangent";
  tangent.rhs = [sigma, r](const Matrix& v) {
    double x = v[0], y = v[1], z = v[2];
    return Matrix::column({sigma * y, -x * z - r * x, x * y});
  };
  tangent.reduced_rhs = [](const std::vector<double>&) { return std::vector<double>{0.0}; };
  out.split_tangent = std::move(tangent);
  Matrix linear(3, 3);
  linear(0, 0) = -sigma;
  linear(1, 1) = -1.0;
  linear(2, 2) = -b;
  out.split_linear = std::move(linear);
  return out;
}

// --- conjugation flow on matrices ------------------------------------------

BuiltinSystem build_isospectral(const Params& raw) {
  int n = int_param(raw, "n", 3.0);
  if (n < 2 || n > 4) throw DomainError("isospectral: n must be in 2..4");
  double g0 = param(raw, "g0", 0.0);
  double g1 = param(raw, "g1", 0.0);
  double g2 = param(raw, "g2", 0.0);

  BuiltinSystem out;
  out.name = "isospectral";
  out.params = {{"n", double(n)}, {"g0", g0}, {"g1", g1}, {"g2", g2}};

  auto gamma = [g0, g1, g2](double t1, double t2) { return g0 + g1 * t1 + g2 * t2; };

  FoliateSystem sys;
  sys.name = "isospectral";
  sys.state_rows = n;
  sys.state_cols = n;
  sys.action = GroupAction::adjoint_conjugation(n, Group::SO);
  sys.tangent_gen = [](const Matrix& l) {
    return AlgebraElement(0.5 * (l - l.transpose()), Algebra::so);
  };
  sys.invariant_field = [gamma](const Matrix& l) {
    double t1 = l.trace();
    double t2 = (l * l).trace();
    return gamma(t1, t2) * l;
  };
  sys.leaf_dim = n;
  sys.leaf_invariant = [n](const Matrix& l) {
    std::vector<double> traces(static_cast<std::size_t>(n));
    Matrix pow = l;
    for (int k = 0; k < n; ++k) {
      traces[static_cast<std::size_t>(k)] = pow.trace();
      if (k + 1 < n) pow = pow * l;
    }
    return traces;
  };
  sys.reduced_rhs = [n, gamma](const std::vector<double>& t) {
    std::vector<double> out_rates(static_cast<std::size_t>(n));
    double g = gamma(t[0], t[1]);
    for (int k = 0; k < n; ++k) out_rates[static_cast<std::size_t>(k)] = (k + 1) * g * t[k];
    return out_rates;
  };
  sys.leaf_jacobian = [n](const Matrix& l) {
    Matrix jac(n, n * n);
    Matrix pow = Matrix::identity(n);  // L^(k-1)
    for (int k = 1; k <= n; ++k) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) jac(k - 1, i * n + j) = k * pow(j, i);
      if (k < n) pow = pow * l;
    }
    return jac;
  };
  Matrix ic(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) ic(i, j) = 0.3 - 0.2 * i;
      else if (i < j) ic(i, j) = 0.4 / (1.0 + i + j);
      else ic(i, j) = -0.3 / (1.0 + i + j);
    }
  }
  sys.default_ic = std::move(ic);
  out.foliate = std::move(sys);
  out.plain = to_plain(*out.foliate);
  return out;
}

// --- left multiplication on frames ------------------------------------------

BuiltinSystem build_left_mult(const Params& raw) {
  int n = int_param(raw, "n", 3.0);
  int p = int_param(raw, "p", 2.0);
  double kappa = param(raw, "kappa", 1.0);
  if (n < 2 || n > 8) throw DomainError("left-mult: n must be in 2..8");
  if (p < 1 || p > n) throw DomainError("left-mult: p must be in 1..n");

  BuiltinSystem out;
  out.name = "left-mult";
  out.params = {{"n", double(n)}, {"p", double(p)}, {"kappa", kappa}};

  int leaf_dim = p * (p + 1) / 2;
  auto triangle = [p](const Matrix& s) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(p * (p + 1) / 2));
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) v.push_back(s(a, b));
    return v;
  };
  auto from_triangle = [p](const std::vector<double>& v) {
    Matrix s(p, p);
    std::size_t k = 0;
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) {
        s(a, b) = v[k];
        s(b, a) = v[k];
        ++k;
      }
    return s;
  };

  FoliateSystem sys;
  sys.name = "left-mult";
  sys.state_rows = n;
  sys.state_cols = p;
  sys.action = GroupAction::left_multiplication(n, p, Group::SO);
  // Tangent coefficient: skew part of A E with E the p-by-n slice of the
  // identity; any map into so(n) works here, this one is nonzero for generic
  // frames.
  Matrix slice(p, n);
  for (int i = 0; i < p; ++i) slice(i, i) = 1.0;
  sys.tangent_gen = [slice](const Matrix& a) {
    Matrix m = a * slice;
    return AlgebraElement(0.5 * (m - m.transpose()), Algebra::so);
  };
  sys.invariant_field = [kappa, p](const Matrix& a) {
    Matrix v = kappa * (Matrix::identity(p) - a.transpose() * a);
    return a * v;
  };
  sys.leaf_dim = leaf_dim;
  sys.leaf_invariant = [triangle](const Matrix& a) { return triangle(a.transpose() * a); };
  sys.reduced_rhs = [kappa, p, triangle, from_triangle](const std::vector<double>& leaf) {
    Matrix s = from_triangle(leaf);
    Matrix v = kappa * (Matrix::identity(p) - s);
    return triangle(v * s + s * v);
  };
  sys.leaf_jacobian = [n, p, leaf_dim](const Matrix& a) {
    Matrix jac(leaf_dim, n * p);
    int row = 0;
    for (int aa = 0; aa < p; ++aa) {
      for (int bb = aa; bb < p; ++bb) {
        for (int i = 0; i < n; ++i) {
          jac(row, i * p + aa) += a(i, bb);
          jac(row, i * p + bb) += a(i, aa);
        }
        ++row;
      }
    }
    return jac;
  };
  Matrix ic(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) ic(i, j) = (i == j ? 1.0 : 0.0) + 0.1 / (1.0 + i + j);
  sys.default_ic = std::move(ic);
  out.foliate = std::move(sys);
  out.plain = to_plain(*out.foliate);
  return out;
}

// --- triangular (skew-product) normal form ----------------------------------

BuiltinSystem build_skew_product(const Params& raw) {
  double alpha = param(raw, "alpha", 1.0);
  double beta = param(raw, "beta", 1.0);
  BuiltinSystem out;
  out.name = "skew-product";
  out.params = {{"alpha", alpha}, {"beta", beta}};

  PlainSystem sys;
  sys.name = "skew-product";
  sys.state_rows = 2;
  sys.state_cols = 1;
  sys.rhs = [alpha, beta](const Matrix& v) {
    return Matrix::column({alpha * v[0], beta * v[0] * v[1]});
  };
  sys.leaf_dim = 1;
  sys.leaf_invariant = [](const Matrix& v) { return std::vector<double>{v[0]}; };
  sys.reduced_rhs = [alpha](const std::vector<double>& leaf) {
    return std::vector<double>{alpha * leaf[0]};
  };
  sys.leaf_jacobian = [](const Matrix&) {
    Matrix jac(1, 2);
    jac(0, 0) = 1.0;
    return jac;
  };
  sys.default_ic = Matrix::column({1.0, 1.0});
  out.plain = std::move(sys);
  return out;
}

}  // namespace

const std::vector<CatalogEntry>& system_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"eq1",
       "planar field with circular leaves: radial drift toward the unit circle plus an "
       "angle-dependent swirl",
       {},
       [](const Params& p) { return build_eq1(p); }},
      {"eq2",
       "planar field with circular leaves: exponential radial growth, angle-dependent swirl",
       {},
       [](const Params& p) { return build_eq2(p); }},
      {"fig1-middle",
       "system with a first integral: the radius is constant, each circle is a fixed leaf",
       {},
       [](const Params& p) { return build_fig1_middle(p); }},
      {"fig1-bottom",
       "rotation-equivariant planar field: radial drift toward the unit circle with a rigid "
       "swirl (a continuous symmetry)",
       {},
       [](const Params& p) { return build_fig1_bottom(p); }},
      {"lorenz",
       "Lorenz equations at b = 2 sigma: the quadratic leaf function x^2 - 2 sigma z decays "
       "exponentially",
       {{"sigma", 10.0}, {"r", 28.0}},
       [](const Params& p) { return build_lorenz(p); }},
      {"isospectral",
       "conjugation flow dL/dt = [A(L), L] + f(L) on n-by-n matrices; power traces of L label "
       "the leaves",
       {{"n", 3.0}, {"g0", 0.0}, {"g1", 0.0}, {"g2", 0.0}},
       [](const Params& p) { return build_isospectral(p); }},
      {"left-mult",
       "frame flow dA/dt = g(A) A + A V(A^T A) on n-by-p matrices; A^T A labels the leaves",
       {{"n", 3.0}, {"p", 2.0}, {"kappa", 1.0}},
       [](const Params& p) { return build_left_mult(p); }},
      {"skew-product",
       "triangular system dx/dt = alpha x, dy/dt = beta x y; x is a linear leaf function",
       {{"alpha", 1.0}, {"beta", 1.0}},
       [](const Params& p) { return build_skew_product(p); }},
  };
  return catalog;
}

std::vector<std::string> system_names() {
  std::vector<std::string> names;
  for (const CatalogEntry& entry : system_catalog()) names.push_back(entry.name);
  return names;
}

BuiltinSystem builtin_system(const std::string& name, const Params& overrides) {
  for (const CatalogEntry& entry : system_catalog()) {
    if (entry.name != name) continue;
    Params resolved = name == "lorenz" ? merged(entry.default_params, overrides, name, {"b"})
                                       : merged(entry.default_params, overrides, name);
    return entry.build(resolved);
  }
  std::string valid;
  for (const std::string& n : system_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw CatalogError("unknown system '" + name + "'; valid systems: " + valid);
}

std::vector<std::string> method_names() {
  return {"euler",  "heun",  "rk4",        "midpoint",         "lie-euler",
          "rkmk1",  "rkmk2", "rkmk4",      "projection",       "discrete-gradient",
          "split"};
}

Stepper make_lorenz_split_stepper(const BuiltinSystem& lorenz, const SolveConfig& cfg,
                                  bool strang) {
  if (!lorenz.split_tangent || !lorenz.split_linear) {
    throw DomainError("system '" + lorenz.name + "' has no two-part splitting");
  }
  std::vector<Stepper> parts;
  parts.push_back(make_implicit_midpoint_stepper(*lorenz.split_tangent, cfg));
  parts.push_back(make_exact_linear_stepper(*lorenz.split_linear));
  return make_splitting_stepper(std::move(parts), "split", strang ? 2 : 1, strang, true);
}

Stepper make_stepper(const BuiltinSystem& sys, const std::string& method,
                     const std::string& tableau, const SolveConfig& cfg) {
  auto tab = [&](const std::string& fallback) -> const ButcherTableau& {
    return ButcherTableau::by_name(tableau.empty() ? fallback : tableau);
  };
  auto need_foliate = [&]() -> const FoliateSystem& {
    if (!sys.foliate) {
      throw DomainError("method '" + method + "' needs a tangent + invariant split, and system '" +
                        sys.name + "' has none registered");
    }
    return *sys.foliate;
  };

  if (method == "euler") return make_rk_stepper(tab("euler"), sys.plain);
  if (method == "heun") return make_rk_stepper(tab("heun"), sys.plain);
  if (method == "rk4") return make_rk_stepper(tab("rk4"), sys.plain);
  if (method == "midpoint") return make_implicit_midpoint_stepper(sys.plain, cfg);
  if (method == "lie-euler") return make_lie_euler_stepper(need_foliate());
  if (method == "rkmk1") return make_rkmk_stepper(need_foliate(), tab("euler"));
  if (method == "rkmk2") return make_rkmk_stepper(need_foliate(), tab("heun"));
  if (method == "rkmk4") return make_rkmk_stepper(need_foliate(), tab("rk4"));
  if (method == "projection") return make_projection_stepper(sys.plain, tab("rk4"), cfg);
  if (method == "discrete-gradient") {
    if (!sys.gradient) {
      throw DomainError("system '" + sys.name + "' has no gradient form registered");
    }
    return make_discrete_gradient_stepper(*sys.gradient, cfg);
  }
  if (method == "split") return make_lorenz_split_stepper(sys, cfg);

  std::string valid;
  for (const std::string& n : method_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw CatalogError("unknown method '" + method + "'; valid methods: " + valid);
}

}  // namespace foliate
