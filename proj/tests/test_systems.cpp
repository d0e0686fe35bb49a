#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "foliate/errors.hpp"
#include "foliate/systems.hpp"
#include "oracles.hpp"

using namespace foliate;

TEST_CASE("catalogue lists its systems and rejects unknown names") {
  std::vector<std::string> names = system_names();
  CHECK(names.size() == 8);
  try {
    builtin_system("nope");
    FAIL("expected CatalogError");
  } catch (const CatalogError& e) {
    for (const std::string& n : names) {
      CHECK(std::string(e.what()).find(n) != std::string::npos);
    }
  }
  CHECK_THROWS_AS(builtin_system("eq1", {{"sigma", 1.0}}), DomainError);
  CHECK_THROWS_AS(builtin_system("isospectral", {{"n", 7.0}}), DomainError);
  CHECK_THROWS_AS(builtin_system("left-mult", {{"p", 5.0}}), DomainError);
  CHECK_THROWS_AS(builtin_system("left-mult", {{"n", 2.5}}), DomainError);
}

TEST_CASE("planar fields match their polar forms") {
  BuiltinSystem eq1 = builtin_system("eq1");
  BuiltinSystem eq2 = builtin_system("eq2");
  BuiltinSystem middle = builtin_system("fig1-middle");
  BuiltinSystem bottom = builtin_system("fig1-bottom");

  CHECK((eq1.plain.rhs(Matrix::column({2.0, 0.0})) - Matrix::column({-6.0, -4.0})).max_abs() <
        1e-14);

  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    double angle = rng.uniform(0.0, 2.0 * M_PI);
    double r = rng.uniform(0.2, 2.0);
    double x = r * std::cos(angle), y = r * std::sin(angle);
    double rdot, thetadot;

    Matrix f1 = eq1.plain.rhs(Matrix::column({x, y}));
    oracles::polar_rates(x, y, f1[0], f1[1], &rdot, &thetadot);
    CHECK(std::abs(rdot - r * (1.0 - r * r)) <= 1e-12);
    CHECK(std::abs(thetadot - (-r * std::cos(angle))) <= 1e-12);

    Matrix f2 = eq2.plain.rhs(Matrix::column({x, y}));
    oracles::polar_rates(x, y, f2[0], f2[1], &rdot, &thetadot);
    CHECK(std::abs(rdot - r) <= 1e-12);
    CHECK(std::abs(thetadot - r * std::sin(angle)) <= 1e-12);

    Matrix fm = middle.plain.rhs(Matrix::column({x, y}));
    oracles::polar_rates(x, y, fm[0], fm[1], &rdot, &thetadot);
    CHECK(std::abs(rdot) <= 1e-12);
    CHECK(std::abs(thetadot - (-r * std::cos(angle))) <= 1e-12);

    Matrix fb = bottom.plain.rhs(Matrix::column({x, y}));
    oracles::polar_rates(x, y, fb[0], fb[1], &rdot, &thetadot);
    CHECK(std::abs(rdot - r * (1.0 - r * r)) <= 1e-12);
    CHECK(std::abs(thetadot - (-(1.0 + r * r / 5.0))) <= 1e-12);
  }

  // The direct rhs oracles agree too.
  for (int trial = 0; trial < 10; ++trial) {
    double x = rng.uniform(-2.0, 2.0), y = rng.uniform(-2.0, 2.0);
    CHECK((eq1.plain.rhs(Matrix::column({x, y})) - oracles::eq1_rhs_direct(x, y)).max_abs() <=
          1e-14);
    CHECK((eq2.plain.rhs(Matrix::column({x, y})) - oracles::eq2_rhs_direct(x, y)).max_abs() <=
          1e-14);
  }
}

TEST_CASE("every foliate entry passes the numerical foliateness check") {
  for (const char* name : {"eq1", "eq2", "fig1-middle", "fig1-bottom", "isospectral",
                           "left-mult"}) {
    BuiltinSystem sys = builtin_system(name);
    REQUIRE(sys.foliate.has_value());
    double residual =
        check_foliate_numeric(sys.plain.rhs, sys.plain.leaf_invariant, sys.foliate->action, 100,
                              0, sys.plain.leaf_jacobian);
    INFO(name, " residual ", residual);
    CHECK(residual <= 1e-10);
  }
}

TEST_CASE("chain rule: dI . X = h(I) on random samples") {
  Rng rng(42);
  for (const char* name : {"eq1", "eq2", "fig1-middle", "fig1-bottom", "lorenz", "isospectral",
                           "left-mult", "skew-product"}) {
    BuiltinSystem sys = builtin_system(
        name, std::string(name) == "isospectral"
                  ? Params{{"g0", 0.1}, {"g1", 0.05}, {"g2", -0.1}}
                  : Params{});
    const PlainSystem& plain = sys.plain;
    REQUIRE(plain.leaf_invariant);
    REQUIRE(plain.reduced_rhs);
    for (int trial = 0; trial < 25; ++trial) {
      Matrix x(plain.state_rows, plain.state_cols);
      for (int k = 0; k < x.size(); ++k) x[k] = rng.normal();
      std::vector<double> lhs = apply_leaf_jacobian(plain.leaf_jacobian(x), plain.rhs(x));
      std::vector<double> rhs = plain.reduced_rhs(plain.leaf_invariant(x));
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        INFO(name, " component ", i);
        CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-10 * (1.0 + std::abs(rhs[i])));
      }
    }
  }
}

TEST_CASE("lorenz: leaf identity, splitting parts, convention") {
  BuiltinSystem lorenz = builtin_system("lorenz");
  double sigma = lorenz.params.at("sigma");
  CHECK(lorenz.params.at("b") == 2.0 * sigma);

  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix v = Matrix::column({rng.normal(), rng.normal(), rng.normal()});
    double leaf = lorenz.plain.leaf_invariant(v)[0];
    double rate = apply_leaf_jacobian(lorenz.plain.leaf_jacobian(v), lorenz.plain.rhs(v))[0];
    CHECK(std::abs(rate + 2.0 * sigma * leaf) <= 1e-10 * (1.0 + std::abs(leaf)));

    // The tangent part keeps the leaf value fixed pointwise.
    double tangent_rate =
        apply_leaf_jacobian(lorenz.plain.leaf_jacobian(v), lorenz.split_tangent->rhs(v))[0];
    CHECK(std::abs(tangent_rate) <= 1e-11 * (1.0 + std::abs(leaf)));

    // Tangent part plus linear part reassemble the full field.
    Matrix sum = lorenz.split_tangent->rhs(v) + (*lorenz.split_linear) * v;
    CHECK((sum - lorenz.plain.rhs(v)).max_abs() <= 1e-12 * (1.0 + sum.max_abs()));
  }

  // Away from b = 2 sigma there is no leaf structure to register.
  BuiltinSystem generic = builtin_system("lorenz", {{"b", 8.0 / 3.0}});
  CHECK_FALSE(generic.plain.leaf_invariant);
}

TEST_CASE("fig1-middle is an integral system") {
  BuiltinSystem middle = builtin_system("fig1-middle");
  CHECK(middle.plain.reduced_rhs({4.0})[0] == 0.0);
  CHECK(middle.plain.rhs(Matrix::column({0.0, 1.0})).max_abs() == 0.0);
}

TEST_CASE("isospectral traces are constant along the tangent part") {
  BuiltinSystem iso = builtin_system("isospectral");  // f = 0 by default
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix l(3, 3);
    for (int k = 0; k < 9; ++k) l[k] = rng.normal();
    std::vector<double> rate = apply_leaf_jacobian(iso.plain.leaf_jacobian(l), iso.plain.rhs(l));
    for (double r : rate) CHECK(std::abs(r) <= 1e-12 * (1.0 + l.max_abs() * l.max_abs()));
  }
}

TEST_CASE("left-mult with p = 1 on the plane has the circular leaf structure") {
  BuiltinSystem lm = builtin_system("left-mult", {{"n", 2.0}, {"p", 1.0}});
  Rng rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    double x = rng.normal(), y = rng.normal();
    std::vector<double> leaf = lm.plain.leaf_invariant(Matrix::column({x, y}));
    CHECK(leaf.size() == 1);
    CHECK(std::abs(leaf[0] - (x * x + y * y)) <= 1e-14);
  }
  // And the invariant part is the same radial drift as eq1's.
  Matrix a = Matrix::column({2.0, 0.0});
  CHECK((lm.foliate->invariant_field(a) - Matrix::column({-6.0, 0.0})).max_abs() <= 1e-14);
}

TEST_CASE("skew-product x-rate does not depend on y") {
  BuiltinSystem sp = builtin_system("skew-product");
  Rng rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    double x = rng.normal(), y = rng.normal();
    double h = 1e-4;
    double up = sp.plain.rhs(Matrix::column({x, y + h}))[0];
    double down = sp.plain.rhs(Matrix::column({x, y - h}))[0];
    CHECK(std::abs((up - down) / (2.0 * h)) <= 1e-10);
  }
  CHECK(sp.plain.leaf_invariant(Matrix::column({0.7, -2.0}))[0] == 0.7);
}

TEST_CASE("default initial conditions have the right shapes") {
  for (const CatalogEntry& entry : system_catalog()) {
    BuiltinSystem sys = builtin_system(entry.name);
    CHECK(sys.plain.default_ic.rows() == sys.plain.state_rows);
    CHECK(sys.plain.default_ic.cols() == sys.plain.state_cols);
    CHECK(sys.plain.default_ic.all_finite());
    CHECK_FALSE(entry.description.empty());
  }
  // Parameter overrides land in the resolved parameter set.
  BuiltinSystem lorenz = builtin_system("lorenz", {{"sigma", 4.0}});
  CHECK(lorenz.params.at("sigma") == 4.0);
  CHECK(lorenz.params.at("b") == 8.0);
}

TEST_CASE("make_stepper wires methods and rejects mismatches") {
  BuiltinSystem eq1 = builtin_system("eq1");
  BuiltinSystem lorenz = builtin_system("lorenz");
  BuiltinSystem sp = builtin_system("skew-product");

  for (const std::string& m : method_names()) {
    if (m == "split") {
      CHECK_NOTHROW(make_stepper(lorenz, m));
      continue;
    }
    CHECK_NOTHROW(make_stepper(eq1, m));
  }
  CHECK_THROWS_AS(make_stepper(eq1, "frog"), CatalogError);
  CHECK_THROWS_AS(make_stepper(sp, "lie-euler"), DomainError);      // no split registered
  CHECK_THROWS_AS(make_stepper(lorenz, "discrete-gradient"), DomainError);
  CHECK_THROWS_AS(make_stepper(eq1, "split"), DomainError);
  CHECK_THROWS_AS(make_stepper(eq1, "rkmk4", "rk9"), CatalogError);  // unknown tableau

  // The tableau override changes the rk order.
  Stepper heun = make_stepper(eq1, "rk4", "heun");
  CHECK(heun.order == 2);
}
