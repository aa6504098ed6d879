#pragma once

#include <string>
#include <vector>

#include "cnfe/estimators.hpp"

namespace cnfe {

struct AdaptiveConfig {
  double tol_S = 1.0;
  double tol_T = 1.0;
  double delta1 = 0.75;
  double delta2 = 1.25;
  double theta1 = 0.9;
  double theta2 = 0.2;
  double refine_fraction = 0.05;
  double coarsen_fraction = 0.10;
  /// Mesh adaptation starts once zeta^S exceeds space_trigger * tol_S; a step
  /// whose mesh was changed is accepted as soon as zeta^S <= tol_S.
  double space_trigger = 0.5;
  int max_inner_iters = 200;
  /// Scale every local estimator except zeta^{S,0}, zeta^{T,0} by eps in the tests.
  bool observable_mode = false;
  /// false: keep k fixed (space adaptivity only).
  bool adapt_time = true;
  double k0 = 1e-3;
  double k_min = 0.0;  // 0: 1e-12 * T
  int degree = 1;
  int initial_elements = 16;
  int quad_points = 0;
  /// Refinement fraction used while adapting the initial grid (0: refine_fraction).
  double initial_refine_fraction = 0.0;
  int max_initial_iters = 500;
  /// Track the midpoint identity residual of every accepted step.
  bool check_midpoint = false;
  EstimatorOptions est;
};

struct StepRecord {
  int n = 0;
  double t = 0.0;
  double k = 0.0;
  int dim = 0;
  int time_iters = 0;
  int space_iters = 0;
  bool clipped = false;  // shortened to land on T
  double zeta_T = 0.0;  // as tested (scaled in observable mode)
  double zeta_S = 0.0;
  StepEstimators est;   // unscaled, without element data
};

struct AdaptEvent {
  int n = 0;
  std::string action;  // shrink-k, grow-k, refine, coarsen, initial-refine
  std::string payload;
};

struct Marking {
  std::vector<std::size_t> refine;
  std::vector<std::size_t> coarsen;
};

/// Fixed-fraction marking: top ceil(rf * n) for refinement, bottom floor(cf * n)
/// for coarsening, disjoint, ties resolved towards the lower element index.
Marking mark(const std::vector<double>& indicators, double refine_fraction, double coarsen_fraction);

/// Per element of V^n: sqrt of the eta(U^n) share + (k^2/4)^2 eta(dW) share +
/// the pair share of the enclosing coarse element split by width.
std::vector<double> element_indicators(const StepResult& result, const StepEstimators& est);

/// Applies refinement, then coarsening among the surviving marked leaves.
MeshPtr adapt_mesh(const Mesh1D& mesh, const Marking& m);

class AdaptiveDriver {
 public:
  AdaptiveDriver(const ProblemSpec& prob, AdaptiveConfig cfg);

  bool done() const;
  /// Computes and accepts one step.
  const StepRecord& advance();
  void run();

  const ProblemSpec& problem() const { return prob_; }
  const AdaptiveConfig& config() const { return cfg_; }
  const StepState& state() const { return state_; }
  const EstimatorTotals& totals() const { return totals_; }
  const std::vector<StepRecord>& records() const { return records_; }
  const std::vector<AdaptEvent>& events() const { return events_; }
  const InitialEstimators& initial() const { return init_; }
  /// floor(sum k_n dim(V^n)) + 1
  long total_dof() const;
  double next_k() const { return k_next_; }
  /// max over accepted steps of k ||W(t_{n-1/2}) + (U^n - Pi U^{n-1})/k|| / ||U^n||
  double midpoint_residual() const { return midpoint_residual_; }

 private:
  struct Trial {
    StepResult result;
    StepEstimators est;
    double zT = 0.0;
    double zS = 0.0;
  };
  void adapt_initial_grid();
  Trial solve(double k, const OperatorsPtr& ops);
  void log(std::string action, std::string payload);

  const ProblemSpec& prob_;
  AdaptiveConfig cfg_;
  CnStepper stepper_;
  StepState state_;
  InitialEstimators init_;
  EstimatorTotals totals_;
  double eta_prev_ = 0.0;
  double k_next_ = 0.0;
  double midpoint_residual_ = 0.0;
  int n_ = 0;
  std::vector<StepRecord> records_;
  std::vector<AdaptEvent> events_;
};

}  // namespace cnfe
