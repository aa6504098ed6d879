#include "cnfe/spectral.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include <fftw3.h>

namespace cnfe {

namespace {

// y_j = sum_i x_i sin(pi i j / M), i, j = 1..M-1, applied to real and imaginary parts.
ComplexVector sine_transform(const ComplexVector& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> re(n), im(n), out(n);
  for (int i = 0; i < n; ++i) {
    re[i] = x[i].real();
    im[i] = x[i].imag();
  }
  fftw_plan plan = fftw_plan_r2r_1d(n, re.data(), out.data(), FFTW_RODFT00, FFTW_ESTIMATE);
  ComplexVector y(n);
  fftw_execute_r2r(plan, re.data(), out.data());
  for (int i = 0; i < n; ++i) y[i] = 0.5 * out[i];
  fftw_execute_r2r(plan, im.data(), out.data());
  for (int i = 0; i < n; ++i) y[i] += Complex(0.0, 0.5 * out[i]);
  fftw_destroy_plan(plan);
  return y;
}

}  // namespace

bool spectral_applicable(const ProblemSpec& prob, const UniformConfig& cfg) {
  return cfg.degree == 1 && prob.g_constant.has_value() && !prob.has_source() && cfg.elements >= 2;
}

UniformResult run_uniform_spectral(const ProblemSpec& prob, const UniformConfig& cfg) {
  if (!spectral_applicable(prob, cfg)) throw Error("spectral: problem/config not eligible");
  const auto start = std::chrono::steady_clock::now();
  const int M = cfg.elements, n = M - 1;
  const double h = (prob.b - prob.a) / M, k = prob.T / cfg.steps;
  const double alpha = prob.alpha, g = *prob.g_constant;

  auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(prob.a, prob.b, M), 1, cfg.quad_points));
  StepState s0 = initial_state(prob, ops);
  UniformResult out;
  out.elements = M;
  out.steps = cfg.steps;
  out.k = k;
  out.totals = EstimatorTotals(initial_estimators(prob, s0, cfg.est.eta));

  // modal coefficients a_j of U^0, c_i = sum_j a_j sin(pi i j / M)
  ComplexVector a = sine_transform(s0.u_prev.coeffs());
  for (auto& z : a) z *= 2.0 / M;

  const Complex I(0.0, 1.0);
  double norm_w = 0, eta_w = 0, op_w = 0, eta_u = 0, eta_pair = 0;
  ComplexVector lam(n);
  for (int j = 1; j <= n; ++j) {
    const double c = std::cos(std::numbers::pi * j / M);
    const double mj = h / 6.0 * (4.0 + 2.0 * c);
    const double sj = (2.0 - 2.0 * c) / h;
    const double mu = -sj / mj;
    const Complex l = (mj / k - 0.5 * I * (alpha * sj + g * mj)) / (mj / k + 0.5 * I * (alpha * sj + g * mj));
    lam[j - 1] = l;
    const Complex aj = a[j - 1];
    const Complex wj = I / k * (g - alpha * mu) * (l - 1.0) * aj;  // |.| independent of n
    const double weight = mj * 0.5 * M;
    norm_w += std::norm(wj) * weight;
    eta_w += std::norm(wj * mu) * weight;
    op_w += std::norm((g - alpha * mu) * wj) * weight;
    eta_u += std::norm(aj * mu) * weight;
    eta_pair += std::norm(aj * mu * (l - 1.0)) * weight;
  }
  const double h4 = h * h * h * h;
  norm_w = std::sqrt(norm_w);
  eta_w = std::sqrt(h4 * eta_w);
  op_w = std::sqrt(op_w);
  eta_u = std::sqrt(h4 * eta_u);
  eta_pair = std::sqrt(h4 * eta_pair);

  StepEstimators s;
  s.k = k;
  s.dim = n;
  s.stats = {g, 0.0};
  s.eta_u = eta_u;
  s.eta_wbar = eta_w;
  s.norm_wbar = norm_w;
  s.zeta_T0 = k * k / 8.0 * (norm_w + cfg.est.C * eta_w);
  s.zeta_T1 = k * k * k / 12.0 * op_w;
  s.zeta_S0 = cfg.est.C * eta_u;
  s.zeta_S1 = cfg.est.C * k * k / 4.0 * eta_w;
  s.zeta_S3 = cfg.est.C_hat * eta_pair;
  for (int step = 1; step <= cfg.steps; ++step) {
    s.t = step * k;
    out.totals.accumulate(s);
    if (cfg.keep_steps) out.log.push_back(s);
  }

  ComplexVector aN(n);
  for (int j = 0; j < n; ++j) aN[j] = a[j] * std::pow(lam[j], cfg.steps);
  out.final_u = FeFunction(ops->space, sine_transform(aN));
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace cnfe
