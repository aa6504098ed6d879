#include "cnfe/problems.hpp"

#include <algorithm>
#include <cmath>

namespace cnfe {

double log_2cosh(double y) {
  const double ay = std::abs(y);
  return ay + std::log1p(std::exp(-2.0 * ay));
}

ComplexField wkb_initial(const WkbData& w) {
  return [w](double x) { return w.n0_sqrt(x) * std::exp(Complex(0.0, w.S0(x) / w.eps)); };
}

ProblemSpec semiclassical(std::string name, double a, double b, double T, double eps, SpaceTimeReal V,
                          const WkbData& data, bool time_dependent) {
  ProblemSpec p;
  p.name = std::move(name);
  p.a = a;
  p.b = b;
  p.T = T;
  p.alpha = eps / 2.0;
  p.g = [V = std::move(V), eps](double x, double t) { return V(x, t) / eps; };
  p.u0 = wkb_initial(data);
  p.eps = eps;
  p.g_time_dependent = time_dependent;
  p.convention = "semiclassical: alpha = eps/2, g = V/eps, f = 0";
  return p;
}

namespace {

WkbData tanh_phase(double lambda, double eps) {
  return {[lambda](double x) { return std::exp(-lambda * lambda * (x - 0.5) * (x - 0.5)); },
          [lambda](double x) { return -log_2cosh(lambda * (x - 0.5)) / lambda; }, eps};
}

ProblemSpec constant_potential(std::string name, double a, double b, double T, double eps, double V,
                               const WkbData& data) {
  auto p = semiclassical(std::move(name), a, b, T, eps, [V](double, double) { return V; }, data, false);
  p.g_constant = V / eps;
  return p;
}

ProblemSpec exp2() {
  ProblemSpec p;
  p.name = "exp2";
  p.a = -2.0;
  p.b = 2.0;
  p.T = 1.0;
  p.alpha = 0.5;
  p.degree = 2;
  p.g = [](double x, double t) { return 0.5 * (1 + t) * (1 + t) * x * x; };
  p.g_time_dependent = true;
  auto phi = [](double x, double t) { return Complex(-25.0 * (x - t) * (x - t), (1 + t) * (1 + x)); };
  p.exact = [phi](double x, double t) { return std::exp(phi(x, t)); };
  p.u0 = [phi](double x) { return std::exp(phi(x, 0.0)); };
  p.f = [phi](double x, double t) {
    const Complex I(0.0, 1.0);
    const Complex phi_t(50.0 * (x - t), 1 + x);
    const Complex phi_x(-50.0 * (x - t), 1 + t);
    const double phi_xx = -50.0;
    const double V = 0.5 * (1 + t) * (1 + t) * x * x;
    return std::exp(phi(x, t)) * (phi_t - 0.5 * I * (phi_xx + phi_x * phi_x) + I * V);
  };
  p.convention = "alpha = 1/2, g = V, f from the exact solution";
  return p;
}

}  // namespace

ProblemSpec catalog(const std::string& name, const CatalogOptions& opts) {
  auto eps_or = [&](double d) { return opts.eps.value_or(d); };
  auto lambda_or = [&](double d) { return opts.lambda.value_or(d); };
  if (name == "exp1a") {
    const double eps = eps_or(1.0);
    WkbData w{[](double x) { return std::exp(-12.5 * x * x); }, [](double x) { return 0.5 * x * x; }, eps};
    auto p = constant_potential(name, -2, 2, 1, eps, 100.0, w);
    p.degree = 1;
    return p;
  }
  if (name == "exp1b") {
    const double eps = eps_or(0.5);
    WkbData w{[](double x) { return std::exp(-25 * (x - 0.5) * (x - 0.5)); }, [](double x) { return 1 + x; }, eps};
    auto p = semiclassical(name, -2, 2, 1, eps, [](double x, double) { return 0.5 * x * x; }, w, false);
    p.degree = 2;
    return p;
  }
  if (name == "exp1c") {
    const double eps = eps_or(0.25);
    WkbData w{[](double x) { return std::exp(-12.5 * x * x); },
              [](double x) { return -log_2cosh(5 * (x - 0.5)) / 5; }, eps};
    auto p = semiclassical(
        name, -2, 2, 1, eps, [](double x, double) { return (x * x - 0.25) * (x * x - 0.25); }, w, false);
    p.degree = 3;
    return p;
  }
  if (name == "exp2") return exp2();
  if (name == "sens") {
    const double eps = eps_or(0.005);
    auto p = constant_potential(name, -1, 2, 0.54, eps, 10.0, tanh_phase(lambda_or(5.0), eps));
    p.degree = 1;
    return p;
  }
  if (name == "case1") {
    const double eps = eps_or(1e-4);
    auto p = constant_potential(name, 0, 1, 0.1, eps, 10.0, tanh_phase(lambda_or(30.0), eps));
    p.degree = 4;
    return p;
  }
  if (name == "case2") {
    const double eps = eps_or(1e-3);
    auto p = semiclassical(name, -1, 2, 0.54, eps, [](double x, double) { return 0.5 * x * x; },
                           tanh_phase(lambda_or(5.0), eps), false);
    p.degree = 3;
    return p;
  }
  if (name == "tdp1" || name == "tdp2") {
    const bool first = name == "tdp1";
    const double eps = eps_or(first ? 1e-2 : 2.5e-3);
    const double lambda = lambda_or(5.0);
    WkbData w{[lambda](double x) { return std::exp(-lambda * lambda * (x - 0.5) * (x - 0.5)); },
              [](double x) { return 5 * (x * x - x); }, eps};
    SpaceTimeReal V = first ? SpaceTimeReal([](double x, double t) { return 0.5 * x * x / (10 * t + 0.05); })
                            : SpaceTimeReal([](double x, double t) { return 0.5 * x * x / (t + 0.05); });
    auto p = first ? semiclassical(name, 1, 2, 3, eps, V, w, true) : semiclassical(name, -1, 2, 1, eps, V, w, true);
    p.degree = first ? 2 : 3;
    p.refine_fraction = 0.01;
    return p;
  }
  if (name == "obs1" || name == "obs2") {
    const bool first = name == "obs1";
    const double eps = eps_or(first ? 1e-3 : 2.5e-4);
    auto p = constant_potential(name, -1, 2, 0.54, eps, 10.0, tanh_phase(lambda_or(5.0), eps));
    p.degree = first ? 2 : 4;
    return p;
  }
  if (name == "obs3") {
    const double eps = eps_or(5e-5);
    auto p = constant_potential(name, 0, 1, 0.1, eps, 10.0, tanh_phase(lambda_or(30.0), eps));
    p.degree = 3;
    return p;
  }
  throw Error("problems: unknown catalog entry '" + name + "'");
}

std::vector<std::string> catalog_names() {
  return {"exp1a", "exp1b", "exp1c", "exp2", "sens", "case1", "case2", "tdp1", "tdp2", "obs1", "obs2", "obs3"};
}

std::vector<double> position_density(const FeFunction& u, const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = std::norm(u.eval(grid[i]));
  return out;
}

std::vector<double> current_density(const FeFunction& u, const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = std::imag(std::conj(u.eval(grid[i])) * u.eval(grid[i], 1));
  }
  return out;
}

std::vector<double> observable_grid(const Mesh1D& mesh, int n) {
  std::vector<double> grid = mesh.breakpoints();
  for (int i = 0; i < n; ++i) grid.push_back(mesh.a() + (mesh.b() - mesh.a()) * i / (n - 1));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace cnfe
