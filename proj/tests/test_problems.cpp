#include <doctest.h>

#include <cmath>

#include "cnfe/problems.hpp"

using namespace cnfe;

TEST_CASE("catalog lists every problem and rejects unknown names") {
  for (const auto& n : catalog_names()) {
    auto p = catalog(n);
    CHECK(p.name == n);
    CHECK(p.a < p.b);
    CHECK(p.T > 0);
    CHECK(static_cast<bool>(p.g));
    CHECK(static_cast<bool>(p.u0));
  }
  CHECK_THROWS_AS(catalog("nope"), Error);
}

TEST_CASE("exp2 exact solution and its source") {
  auto p = catalog("exp2");
  CHECK(std::abs(p.exact(0, 0) - std::exp(Complex(0, 1))) < 1e-15);
  CHECK(std::abs(p.exact(0.5, 0) - std::exp(Complex(-6.25, 1.5))) < 1e-15);
  CHECK(std::abs(p.u0(0.3) - p.exact(0.3, 0.0)) < 1e-15);
  // residual u_t - i alpha u_xx + i g u - f by central differences
  const double h = 1e-4;
  for (double x : {-0.4, 0.1, 0.35}) {
    for (double t : {0.2, 0.5}) {
      const Complex ut = (p.exact(x, t + h) - p.exact(x, t - h)) / (2 * h);
      const Complex uxx = (p.exact(x + h, t) - 2.0 * p.exact(x, t) + p.exact(x - h, t)) / (h * h);
      const Complex res = ut - Complex(0, p.alpha) * uxx + Complex(0, 1) * p.g(x, t) * p.exact(x, t) - p.f(x, t);
      CHECK(std::abs(res) < 1e-5 * (1 + std::abs(p.f(x, t))));
    }
  }
}

TEST_CASE("semiclassical scaling and WKB modulus") {
  CatalogOptions o;
  o.eps = 2e-3;
  auto p = catalog("case2", o);
  CHECK(p.alpha == doctest::Approx(1e-3));
  CHECK(p.g(1.0, 0.0) == doctest::Approx(0.5 / 2e-3));
  for (double x : {-0.5, 0.2, 0.5, 1.3}) {
    CHECK(std::abs(p.u0(x)) == doctest::Approx(std::exp(-25.0 * (x - 0.5) * (x - 0.5))).epsilon(1e-13));
  }
  CHECK(log_2cosh(800.0) == doctest::Approx(800.0));
  CHECK(log_2cosh(0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("constant-potential problems flag their constant") {
  auto p = catalog("obs1");
  REQUIRE(p.g_constant.has_value());
  CHECK(*p.g_constant == doctest::Approx(10.0 / 1e-3));
  CHECK(p.degree == 2);
  CHECK_FALSE(catalog("tdp1").g_constant.has_value());
  CHECK(catalog("tdp1").g_time_dependent);
}

TEST_CASE("position and current density of a piecewise linear function") {
  auto space = SplineSpace::make(Mesh1D::uniform(0, 1, 4), 1);
  FeFunction u(space, {Complex(1.0), Complex(0, 1), Complex(-1.0)});
  auto grid = observable_grid(space->mesh(), 5);
  CHECK(grid.size() == 5);
  auto n = position_density(u, grid);
  CHECK(n[1] == doctest::Approx(1.0));
  CHECK(n[2] == doctest::Approx(1.0));
  auto j = current_density(u, grid);
  // Im(conj(1) * (i - 1) / h) on the second element, evaluated at its left end
  CHECK(j[1] == doctest::Approx(4.0));
}
