#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "foliate/diagnostics.hpp"
#include "foliate/errors.hpp"
#include "foliate/integrators.hpp"
#include "foliate/systems.hpp"
#include "oracles.hpp"

using namespace foliate;

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

double radius(const Matrix& v) { return std::hypot(v[0], v[1]); }

}  // namespace

TEST_CASE("tableau invariants") {
  for (const std::string& name : ButcherTableau::names()) {
    const ButcherTableau& tab = ButcherTableau::by_name(name);
    double bsum = 0.0;
    for (double w : tab.b) bsum += w;
    CHECK(std::abs(bsum - 1.0) <= 1e-14);
    for (int i = 0; i < tab.stages; ++i) {
      double csum = 0.0;
      for (int j = 0; j < tab.stages; ++j) {
        csum += tab.a[i][j];
        if (j >= i) CHECK(tab.a[i][j] == 0.0);
      }
      CHECK(std::abs(csum - tab.c[i]) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(ButcherTableau::by_name("rk9"), CatalogError);
  CHECK_THROWS_AS(ButcherTableau("bad", {{0.0}}, {0.5}, {0.0}, 1), DomainError);
}

TEST_CASE("explicit Runge-Kutta steps") {
  // Euler on x' = x.
  StateMap growth = [](const Matrix& x) { return x; };
  Matrix one = Matrix::column({1.0});
  CHECK(std::abs(rk_step(ButcherTableau::euler(), growth, one, 0.1)[0] - 1.1) <= 1e-15);

  // rk4 on a rotation: one step matches the closed form to local order.
  Matrix j(2, 2, {0.0, -1.0, 1.0, 0.0});
  StateMap spin = [j](const Matrix& x) { return j * x; };
  Matrix x0 = Matrix::column({1.0, 0.0});
  Matrix got = rk_step(ButcherTableau::rk4(), spin, x0, 0.1);
  CHECK(max_diff(got, oracles::rotation2(0.1) * x0) <= 1e-7);

  // Euler on the planar limit-cycle field drifts off the leaf.
  BuiltinSystem eq1 = builtin_system("eq1");
  Matrix stepped = rk_step(ButcherTableau::euler(), eq1.plain.rhs, Matrix::column({2.0, 0.0}), 0.1);
  CHECK(max_diff(stepped, Matrix::column({1.4, -0.4})) < 1e-14);
  CHECK(std::abs(radius(stepped) - 1.4) > 0.05);  // not the reduced-Euler radius
}

TEST_CASE("rk_step reports the diverging stage") {
  StateMap blowup = [](const Matrix& x) {
    return Matrix::column({x[0] * x[0] * 1e150});
  };
  try {
    Matrix x = rk_step(ButcherTableau::rk4(), blowup, Matrix::column({1e150}), 1.0);
    (void)x;
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.index >= 0);
  }
}

TEST_CASE("linear leaf functions pass through Runge-Kutta untouched") {
  // Triangular system: the x-coordinate is a closed subsystem, so any RK
  // x-trajectory depends on x alone; two starts with equal x stay equal.
  BuiltinSystem sp = builtin_system("skew-product");
  Matrix a0 = Matrix::column({1.0, 0.5});
  Matrix b0 = Matrix::column({1.0, -0.7});
  for (const char* method : {"euler", "rk4", "midpoint"}) {
    Stepper stepper = make_stepper(sp, method, "", {1e-13, 100});
    Matrix a = a0, b = b0;
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      a = stepper(a, 0.01);
      b = stepper(b, 0.01);
      worst = std::max(worst, std::abs(a[0] - b[0]));
    }
    CHECK(worst <= 1e-13);
  }
}

TEST_CASE("implicit midpoint preserves quadratic invariants") {
  // Circular spin: the radius is a quadratic invariant.
  Matrix j(2, 2, {0.0, -1.0, 1.0, 0.0});
  StateMap spin = [j](const Matrix& x) { return j * x; };
  Matrix x = Matrix::column({1.0, 0.0});
  for (int n = 0; n < 50; ++n) x = implicit_midpoint_step(spin, x, 0.1);
  CHECK(std::abs(radius(x) - 1.0) <= 1e-12);

  // Lorenz leaf-tangent part: x^2 - 2 sigma z is quadratic and invariant.
  BuiltinSystem lorenz = builtin_system("lorenz");
  const PlainSystem& tangent = *lorenz.split_tangent;
  Matrix v = Matrix::column({1.0, 1.0, 1.0});
  auto leaf = lorenz.plain.leaf_invariant;
  double before = leaf(v)[0];
  Matrix stepped = implicit_midpoint_step(tangent.rhs, v, 0.01, {1e-13, 100});
  CHECK(std::abs(leaf(stepped)[0] - before) <= 1e-10);
}

TEST_CASE("implicit midpoint radius expansion on the exponential swirl") {
  // r'^2 = r^2 (1 + 2 tau + 2 tau^2 + tau^3 (3 - y^2)/2) + O(tau^4) from
  // (0, 1), where the coefficient is 1.
  BuiltinSystem eq2 = builtin_system("eq2");
  double tau = 1e-3;
  Matrix x0 = Matrix::column({0.0, 1.0});
  Matrix x1 = implicit_midpoint_step(eq2.plain.rhs, x0, tau, {1e-15, 100});
  double r2 = 1.0;
  double c = (dot(x1, x1) - r2 * (1.0 + 2.0 * tau + 2.0 * tau * tau)) / (r2 * tau * tau * tau);
  CHECK(c == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("implicit midpoint reports nonconvergence") {
  StateMap stiff = [](const Matrix& x) { return Matrix::column({1e8 * x[0]}); };
  CHECK_THROWS_AS(implicit_midpoint_step(stiff, Matrix::column({1.0}), 1.0, {1e-12, 30}),
                  NonconvergenceError);
}

TEST_CASE("every stepper is the identity at tau = 0") {
  BuiltinSystem eq1 = builtin_system("eq1");
  BuiltinSystem lorenz = builtin_system("lorenz");
  Matrix x2 = Matrix::column({1.3, -0.4});
  Matrix x3 = Matrix::column({1.0, 2.0, 3.0});

  std::vector<std::pair<Stepper, Matrix>> cases;
  for (const char* m : {"euler", "rk4", "midpoint", "lie-euler", "rkmk4", "projection",
                               "discrete-gradient"}) {
    cases.emplace_back(make_stepper(eq1, m), x2);
  }
  cases.emplace_back(make_stepper(lorenz, "split"), x3);
  cases.emplace_back(make_exact_linear_stepper(Matrix(3, 3, {0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0,
                                                             0.0, 0.0})),
                     x3);
  for (const auto& [stepper, x] : cases) {
    CHECK(max_diff(stepper(x, 0.0), x) <= 1e-15);
  }
}

TEST_CASE("Lie-Euler closed form on the planar system") {
  BuiltinSystem eq1 = builtin_system("eq1");
  Matrix x0 = Matrix::column({2.0, 0.0});
  Matrix got = lie_euler_step(*eq1.foliate, x0, 0.1);
  // Drift to (1.4, 0), then rotate by -0.2.
  Matrix want = Matrix::column({1.4 * std::cos(0.2), -1.4 * std::sin(0.2)});
  CHECK(max_diff(got, want) < 1e-12);
  CHECK(std::abs(radius(got) - 1.4) <= 1e-14);  // exactly the reduced Euler radius
}

TEST_CASE("Lie-Euler on a pure rotation keeps the radius") {
  BuiltinSystem middle = builtin_system("fig1-middle");
  Matrix x = Matrix::column({2.0, 0.0});
  for (int n = 0; n < 100; ++n) x = lie_euler_step(*middle.foliate, x, 0.05);
  CHECK(std::abs(radius(x) - 2.0) <= 1e-13);
}

TEST_CASE("Lie-Euler conjugation preserves the spectrum when f = 0") {
  BuiltinSystem iso = builtin_system("isospectral");
  Matrix l = iso.foliate->default_ic;
  std::vector<double> before = char_poly_coeffs(l);
  for (int n = 0; n < 100; ++n) l = lie_euler_step(*iso.foliate, l, 0.01);
  std::vector<double> after = char_poly_coeffs(l);
  for (std::size_t k = 0; k < before.size(); ++k) {
    CHECK(std::abs(before[k] - after[k]) <= 1e-12);
  }
}

TEST_CASE("RKMK with the Euler tableau is Lie-Euler") {
  for (const char* name : {"eq1", "isospectral", "left-mult"}) {
    BuiltinSystem sys = builtin_system(name);
    Matrix x = sys.foliate->default_ic;
    for (int n = 0; n < 5; ++n) {
      Matrix a = rkmk_step(*sys.foliate, ButcherTableau::euler(), x, 0.05);
      Matrix b = lie_euler_step(*sys.foliate, x, 0.05);
      CHECK(max_diff(a, b) <= 1e-15 * (1.0 + b.max_abs()));
      x = b;
    }
  }
}

TEST_CASE("RKMK radius sequence is the one-dimensional RK map of the reduced flow") {
  // The invariant-part update is a radial field, so the rkmk4 radius follows
  // rk4 applied directly to dr/dt = r (1 - r^2).
  BuiltinSystem eq1 = builtin_system("eq1");
  auto reduced_rk4 = [](double r, double tau) {
    auto f = [](double v) { return v * (1.0 - v * v); };
    double k1 = f(r);
    double k2 = f(r + 0.5 * tau * k1);
    double k3 = f(r + 0.5 * tau * k2);
    double k4 = f(r + tau * k3);
    return r + tau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  Matrix x = Matrix::column({2.0, 0.0});
  double r = 2.0;
  for (int n = 0; n < 20; ++n) {
    x = rkmk_step(*eq1.foliate, ButcherTableau::rk4(), x, 0.05);
    r = reduced_rk4(r, 0.05);
    CHECK(std::abs(radius(x) - r) <= 1e-12);
  }
}

TEST_CASE("RKMK keeps co-leaf frame trajectories together") {
  BuiltinSystem lm = builtin_system("left-mult");
  Rng rng(31);
  Matrix a = lm.foliate->default_ic;
  Matrix u0 = lm.foliate->action.random_group_element(rng);
  Matrix b = u0 * a;
  auto leaf = lm.plain.leaf_invariant;
  for (int n = 0; n < 20; ++n) {
    a = rkmk_step(*lm.foliate, ButcherTableau::rk4(), a, 0.01);
    b = rkmk_step(*lm.foliate, ButcherTableau::rk4(), b, 0.01);
    std::vector<double> la = leaf(a), lb = leaf(b);
    for (std::size_t k = 0; k < la.size(); ++k) CHECK(std::abs(la[k] - lb[k]) <= 1e-13);
  }
}

TEST_CASE("projection step lands on the reduced leaf") {
  BuiltinSystem eq1 = builtin_system("eq1");
  Stepper inner = make_rk_stepper(ButcherTableau::rk4(), eq1.plain);
  PlainSystem reduced_sys;
  reduced_sys.state_rows = 1;
  reduced_sys.state_cols = 1;
  reduced_sys.rhs = [h = eq1.plain.reduced_rhs](const Matrix& v) {
    return Matrix::column(h({v[0]}));
  };
  Stepper reduced = make_rk_stepper(ButcherTableau::rk4(), reduced_sys);

  Matrix x = Matrix::column({2.0, 0.0});
  std::vector<double> leaf = eq1.plain.leaf_invariant(x);
  ProjectionResult result = projection_step(eq1.plain, inner, reduced, x, leaf, 0.1);
  CHECK(std::abs(eq1.plain.leaf_invariant(result.state)[0] - result.leaf[0]) <= 1e-12);

  // A foliate inner stepper already lands on the target leaf of the
  // integral system, so the projector returns it unchanged.
  BuiltinSystem middle = builtin_system("fig1-middle");
  Stepper foliate_inner = make_lie_euler_stepper(*middle.foliate);
  PlainSystem zero_reduced = reduced_sys;
  zero_reduced.rhs = [](const Matrix&) { return Matrix::column({0.0}); };
  Stepper reduced0 = make_rk_stepper(ButcherTableau::rk4(), zero_reduced);
  Matrix y = Matrix::column({1.0, 1.0});
  ProjectionResult unchanged = projection_step(middle.plain, foliate_inner, reduced0, y,
                                               middle.plain.leaf_invariant(y), 0.1);
  Matrix predicted = foliate_inner(y, 0.1);
  CHECK(max_diff(unchanged.state, predicted) <= 1e-13);

  // Singular leaf at the origin.
  Matrix origin = Matrix::column({0.0, 0.0});
  CHECK_THROWS_AS(projection_step(eq1.plain, inner, reduced, origin,
                                  eq1.plain.leaf_invariant(origin), 0.1),
                  SingularLeafError);

  // Starved Newton budget.
  CHECK_THROWS_AS(projection_step(eq1.plain, inner, reduced, x, leaf, 0.1, {1e-14, 1}),
                  NonconvergenceError);
}

TEST_CASE("discrete gradient obeys the leaf recursion") {
  BuiltinSystem eq1 = builtin_system("eq1");
  const GradientSystem& grad = *eq1.gradient;
  Matrix x = Matrix::column({2.0, 0.0});
  SolveConfig cfg{1e-13, 100};
  for (int n = 0; n < 50; ++n) {
    Matrix next = discrete_gradient_step(grad, x, 0.05, cfg);
    double hbar = grad.reduced_rhs(0.5 * (grad.leaf_value(x) + grad.leaf_value(next)));
    CHECK(std::abs(grad.leaf_value(next) - grad.leaf_value(x) - 0.05 * hbar) <= 1e-12);
    x = next;
  }

  // h = 0 freezes the leaf value (energy-conserving case).
  GradientSystem conservative = grad;
  conservative.reduced_rhs = [](double) { return 0.0; };
  Matrix y = Matrix::column({2.0, 0.0});
  double level = conservative.leaf_value(y);
  for (int n = 0; n < 50; ++n) {
    y = discrete_gradient_step(conservative, y, 0.05, cfg);
    CHECK(std::abs(conservative.leaf_value(y) - level) <= 1e-12);
  }

  // tau = 0 returns the state unchanged; the origin is a singular leaf.
  CHECK(max_diff(discrete_gradient_step(grad, x, 0.0, cfg), x) == 0.0);
  CHECK_THROWS_AS(discrete_gradient_step(grad, Matrix::column({0.0, 0.0}), 0.05, cfg),
                  SingularLeafError);

  // An over-large step defeats the fixed-point iteration.
  try {
    discrete_gradient_step(grad, Matrix::column({2.0, 0.0}), 10.0, {1e-13, 5});
    FAIL("expected NonconvergenceError");
  } catch (const NonconvergenceError& e) {
    CHECK(e.residual > 0.0);
  }
}

TEST_CASE("splitting composition") {
  // A single part composes to itself.
  BuiltinSystem eq1 = builtin_system("eq1");
  Stepper rk = make_rk_stepper(ButcherTableau::rk4(), eq1.plain);
  std::vector<Stepper> single{rk};
  Matrix x = Matrix::column({1.2, 0.3});
  CHECK(max_diff(splitting_step(single, x, 0.1), rk(x, 0.1)) == 0.0);

  // Lorenz splitting: the leaf value contracts by exp(-2 sigma tau) per step.
  BuiltinSystem lorenz = builtin_system("lorenz");
  Stepper split = make_stepper(lorenz, "split", "", {1e-13, 100});
  auto leaf = lorenz.plain.leaf_invariant;
  Matrix v = Matrix::column({1.0, 1.0, 1.0});
  double factor = std::exp(-0.2);
  for (int n = 0; n < 20; ++n) {
    Matrix next = split(v, 0.01);
    CHECK(std::abs(leaf(next)[0] - factor * leaf(v)[0]) <=
          1e-10 * (1.0 + std::abs(leaf(v)[0])));
    v = next;
  }
}

TEST_CASE("Strang composition of two exact linear flows has order 2") {
  Matrix l1(2, 2, {0.0, 1.0, 0.0, 0.0});
  Matrix l2(2, 2, {0.0, 0.0, 1.0, 0.0});
  std::vector<Stepper> parts{make_exact_linear_stepper(l1), make_exact_linear_stepper(l2)};
  Stepper strang = make_splitting_stepper(parts, "strang", 2, true);
  StateMap full = [sum = l1 + l2](const Matrix& x) { return sum * x; };
  std::vector<double> taus{0.2, 0.1, 0.05, 0.025};
  ConvergenceReport report =
      convergence_order(strang, full, Matrix::column({1.0, 0.4}), 1.0, taus);
  CHECK(report.slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("exact linear step closed forms") {
  Matrix j(2, 2, {0.0, -1.0, 1.0, 0.0});
  CHECK(max_diff(exact_linear_step(j, Matrix::column({1.0, 0.0}), M_PI / 2.0),
                 Matrix::column({0.0, 1.0})) <= 1e-13);
  CHECK(max_diff(exact_linear_step(Matrix(2, 2), Matrix::column({0.3, 0.4}), 0.7),
                 Matrix::column({0.3, 0.4})) == 0.0);

  // Lorenz linear part: componentwise decay rates sigma, 1, 2 sigma.
  double sigma = 10.0;
  Matrix lam(3, 3);
  lam(0, 0) = -sigma;
  lam(1, 1) = -1.0;
  lam(2, 2) = -2.0 * sigma;
  Matrix v = exact_linear_step(lam, Matrix::column({1.0, 1.0, 1.0}), 0.01);
  CHECK(std::abs(v[0] - std::exp(-0.1)) <= 1e-15);
  CHECK(std::abs(v[1] - std::exp(-0.01)) <= 1e-15);
  CHECK(std::abs(v[2] - std::exp(-0.2)) <= 1e-15);
}

TEST_CASE("midpoint is not foliate for the quadratic foliation; Lie-Euler is") {
  BuiltinSystem eq2 = builtin_system("eq2");
  Stepper midpoint = make_implicit_midpoint_stepper(eq2.plain, {1e-14, 100});
  Stepper lie = make_lie_euler_stepper(*eq2.foliate);
  auto leaf = eq2.plain.leaf_invariant;

  double tau = 0.01;
  double mid_lo = 1e300, mid_hi = -1e300, lie_lo = 1e300, lie_hi = -1e300;
  for (int j = 0; j < 20; ++j) {
    double angle = 2.0 * M_PI * j / 20;
    Matrix ic = Matrix::column({std::cos(angle), std::sin(angle)});
    double after_mid = leaf(midpoint(ic, tau))[0];
    double after_lie = leaf(lie(ic, tau))[0];
    mid_lo = std::min(mid_lo, after_mid);
    mid_hi = std::max(mid_hi, after_mid);
    lie_lo = std::min(lie_lo, after_lie);
    lie_hi = std::max(lie_hi, after_lie);
  }
  CHECK(mid_hi - mid_lo > 1e-9);    // leaf spread after one midpoint step
  CHECK(lie_hi - lie_lo <= 1e-13);  // Lie-Euler moves the whole leaf together
}
