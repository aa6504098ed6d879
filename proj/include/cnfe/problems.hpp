#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnfe/assembly.hpp"

namespace cnfe {

/// u_t - i alpha u_xx + i g(x,t) u = f on (a,b) x (0,T], u = 0 on the boundary.
struct ProblemSpec {
  std::string name;
  double a = 0.0;
  double b = 1.0;
  double T = 1.0;
  double alpha = 0.5;
  SpaceTimeReal g;
  SpaceTimeComplex f;  // empty means f = 0
  ComplexField u0;
  SpaceTimeComplex exact;  // empty when no closed form is known
  std::optional<double> eps;
  bool g_time_dependent = false;
  /// Set when g is one constant in space and time.
  std::optional<double> g_constant;
  /// Catalog defaults.
  int degree = 1;
  double refine_fraction = 0.05;
  std::string convention;

  bool has_source() const { return static_cast<bool>(f); }
  bool has_exact() const { return static_cast<bool>(exact); }
  Complex source(double x, double t) const { return f ? f(x, t) : Complex(0.0); }
};

/// Amplitude/phase form sqrt(n0) exp(i S0 / eps).
struct WkbData {
  RealField n0_sqrt;
  RealField S0;
  double eps = 1.0;
};

ComplexField wkb_initial(const WkbData& w);

/// ln(e^y + e^-y) without overflow.
double log_2cosh(double y);

/// eps-scaled form: alpha = eps/2, g = V/eps, f = 0.
ProblemSpec semiclassical(std::string name, double a, double b, double T, double eps, SpaceTimeReal V,
                          const WkbData& data, bool time_dependent);

struct CatalogOptions {
  std::optional<double> eps;
  std::optional<double> lambda;
};

/// Built-in experiments: exp1a exp1b exp1c exp2 sens case1 case2 tdp1 tdp2 obs1 obs2 obs3.
ProblemSpec catalog(const std::string& name, const CatalogOptions& opts = {});
std::vector<std::string> catalog_names();

/// N = |u|^2 and J = Im(conj(u) u') on a set of points.
std::vector<double> position_density(const FeFunction& u, const std::vector<double>& grid);
std::vector<double> current_density(const FeFunction& u, const std::vector<double>& grid);
/// n uniform points on [a, b] merged with the mesh breakpoints.
std::vector<double> observable_grid(const Mesh1D& mesh, int n);

}  // namespace cnfe
