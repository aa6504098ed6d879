#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cnfe/estimators.hpp"

namespace cnfe {

struct UniformConfig {
  int degree = 1;
  int elements = 0;  // M
  int steps = 0;     // N, k = T / N
  int quad_points = 0;
  EstimatorOptions est;
  bool keep_steps = true;
  /// Record max over steps of ||W(t_{n-1/2}) + (U^n - Pi U^{n-1})/k|| * k / ||U^n||.
  bool check_midpoint = false;
};

/// Error functional evaluated at every node time (including t = 0).
using ErrorProbe = std::function<double(int n, double t, const FeFunction& u)>;

struct UniformResult {
  int elements = 0;
  int steps = 0;
  double k = 0.0;
  EstimatorTotals totals;
  std::vector<StepEstimators> log;
  double error = -1.0;  // max of the probe, negative without a probe
  double midpoint_residual = 0.0;
  double seconds = 0.0;
  FeFunction final_u;
};

UniformResult run_uniform(const ProblemSpec& prob, const UniformConfig& cfg, const ErrorProbe& probe = {});

/// ||u(t_n) - U^n|| against the closed-form solution.
ErrorProbe exact_error_probe(const ProblemSpec& prob, int quad_points = 10);

/// Fine-grid solution sampled at every `sample_every`-th step.
struct ReferenceSolution {
  double k_sample = 0.0;
  std::vector<FeFunction> samples;
};
ReferenceSolution make_reference(const ProblemSpec& prob, int steps, int elements, int degree, int sample_every);
/// Compares U^n with the reference sample at t_n (t_n must be a sample time).
ErrorProbe reference_error_probe(const ReferenceSolution& ref, int quad_points = 0);

/// Pairwise log(E_l / E_{l+1}) / log(R_{l+1} / R_l) for a resolution R (M or 1/k).
std::vector<double> eoc(const std::vector<double>& values, const std::vector<double>& resolution);

}  // namespace cnfe
