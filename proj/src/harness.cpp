#include "cnfe/harness.hpp"

#include <chrono>
#include <cmath>

namespace cnfe {

namespace {

void drop_locals(StepEstimators& s) {
  s.eta_u_sq = {};
  s.eta_wbar_sq = {};
  s.pair = {};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

UniformResult run_uniform(const ProblemSpec& prob, const UniformConfig& cfg, const ErrorProbe& probe) {
  if (cfg.elements < 1 || cfg.steps < 1) throw Error("harness: uniform run needs elements and steps");
  const auto start = std::chrono::steady_clock::now();
  UniformResult out;
  out.elements = cfg.elements;
  out.steps = cfg.steps;
  out.k = prob.T / cfg.steps;
  auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(prob.a, prob.b, cfg.elements), cfg.degree, cfg.quad_points));
  StepState state = initial_state(prob, ops);
  out.totals = EstimatorTotals(initial_estimators(prob, state, cfg.est.eta));
  if (probe) out.error = probe(0, 0.0, state.u_prev);
  CnStepper stepper(prob);
  double eta_prev = out.totals.eta0();
  for (int n = 1; n <= cfg.steps; ++n) {
    StepResult r = stepper.step(state, out.k, ops, cfg.check_midpoint);
    r.t_prev = (n - 1) * out.k;
    StepEstimators s = step_estimators(state, r, prob, cfg.est, eta_prev);
    eta_prev = s.eta_u;
    s.t = n * out.k;
    drop_locals(s);
    out.totals.accumulate(s);
    if (cfg.keep_steps) out.log.push_back(s);
    if (cfg.check_midpoint) {
      FeFunction res = *r.wmid;
      for (int i = 0; i < res.dim(); ++i) res.coeffs()[i] += (r.u_new.coeffs()[i] - r.pi_u_prev.coeffs()[i]) / out.k;
      const double scale = l2_norm(Expr(r.u_new));
      out.midpoint_residual = std::max(out.midpoint_residual, l2_norm(Expr(res)) * out.k / std::max(scale, 1e-300));
    }
    state = CnStepper::next_state(r);
    state.t_prev = n * out.k;
    if (probe) out.error = std::max(out.error, probe(n, state.t_prev, state.u_prev));
  }
  out.final_u = state.u_prev;
  out.seconds = seconds_since(start);
  return out;
}

ErrorProbe exact_error_probe(const ProblemSpec& prob, int quad_points) {
  if (!prob.has_exact()) throw Error("harness: problem has no exact solution");
  return [&prob, quad_points](int, double t, const FeFunction& u) {
    Expr e;
    e.add_field([&prob, t](double x) { return prob.exact(x, t); }).add(u, -1.0);
    return l2_norm(e, quad_points);
  };
}

ReferenceSolution make_reference(const ProblemSpec& prob, int steps, int elements, int degree, int sample_every) {
  if (sample_every < 1 || steps % sample_every != 0) throw Error("harness: reference sampling must divide the step count");
  ReferenceSolution ref;
  const double k = prob.T / steps;
  ref.k_sample = k * sample_every;
  auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(prob.a, prob.b, elements), degree));
  StepState state = initial_state(prob, ops);
  ref.samples.push_back(state.u_prev);
  CnStepper stepper(prob);
  for (int n = 1; n <= steps; ++n) {
    StepResult r = stepper.step(state, k, ops);
    state = CnStepper::next_state(r);
    state.t_prev = n * k;
    if (n % sample_every == 0) ref.samples.push_back(state.u_prev);
  }
  return ref;
}

ErrorProbe reference_error_probe(const ReferenceSolution& ref, int quad_points) {
  return [&ref, quad_points](int, double t, const FeFunction& u) {
    const double j = t / ref.k_sample;
    const long idx = std::lround(j);
    if (std::abs(j - idx) > 1e-6 || idx < 0 || idx >= static_cast<long>(ref.samples.size())) {
      throw Error("harness: node time is not a reference sample time");
    }
    return l2_distance(ref.samples[static_cast<std::size_t>(idx)], u, quad_points);
  };
}

std::vector<double> eoc(const std::vector<double>& values, const std::vector<double>& resolution) {
  if (values.size() != resolution.size() || values.size() < 2) throw Error("eoc: need at least two matching rows");
  std::vector<double> out;
  for (std::size_t l = 0; l + 1 < values.size(); ++l) {
    if (!(values[l] > 0.0) || !(values[l + 1] > 0.0)) throw Error("eoc: estimator values must be positive");
    out.push_back(std::log(values[l] / values[l + 1]) / std::log(resolution[l + 1] / resolution[l]));
  }
  return out;
}

}  // namespace cnfe
