#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnfe/adaptive.hpp"
#include "cnfe/spectral.hpp"

namespace cnfe {

/// Takes the sine-transform path when it applies and no probe is requested.
UniformResult run_uniform_auto(const ProblemSpec& prob, const UniformConfig& cfg, const ErrorProbe& probe = {});

struct SensitivityPoint {
  double eps = 0.0;
  int elements = 0;
  int steps = 0;
};

struct SensitivityRow {
  SensitivityPoint point;
  double h = 0.0;
  double k = 0.0;
  EstimatorTotals totals;
  double seconds = 0.0;
  bool spectral = false;
};

/// One uniform run of the named catalog problem per point (eps overrides the catalog value).
std::vector<SensitivityRow> run_sensitivity(const std::string& problem, int degree,
                                            const std::vector<SensitivityPoint>& points);
/// k = h sweep: M = (b - a) / h, N = T / h, both rounded.
std::vector<SensitivityPoint> k_equals_h(const ProblemSpec& prob, const std::vector<double>& hs);
/// Fixed k with an M sweep, or fixed M with a k sweep.
std::vector<SensitivityPoint> fixed_k_sweep(const ProblemSpec& prob, double k, const std::vector<int>& elements);
std::vector<SensitivityPoint> fixed_m_sweep(const ProblemSpec& prob, int elements, const std::vector<double>& ks);

std::string sensitivity_csv_header();
std::string sensitivity_csv_row(const SensitivityRow& r);

/// Running tilde estimators after each accepted step.
struct TrajectoryPoint {
  double t = 0.0;
  double k = 0.0;
  int dim = 0;
  double tilde_T = 0.0;
  double tilde_S = 0.0;
  double total = 0.0;
};

std::vector<TrajectoryPoint> trajectory_of(const InitialEstimators& init, const std::vector<StepEstimators>& steps);

struct UniformComparison {
  int elements = 0;
  int steps = 0;
  double k = 0.0;
  long total_dof = 0;
  EstimatorTotals totals;
  std::vector<TrajectoryPoint> trajectory;
  FeFunction final_u;
  double seconds = 0.0;
};

struct AdaptiveReport {
  std::vector<StepRecord> records;
  std::vector<AdaptEvent> events;
  InitialEstimators initial;
  EstimatorTotals totals;
  std::vector<TrajectoryPoint> trajectory;
  long total_dof = 0;
  /// k of the last accepted step that was not shortened to hit T.
  double settled_k = 0.0;
  FeFunction initial_u;
  FeFunction final_u;
  nlohmann::json snapshots = nlohmann::json::array();
  std::optional<UniformComparison> uniform;
  double seconds = 0.0;
};

struct AdaptiveExperimentConfig {
  AdaptiveConfig adaptive;
  /// Run a uniform partition with the same Total DoF and the settled k.
  bool compare_uniform = false;
  /// Solution snapshots (mesh + coefficients) at the first accepted t_n >= each time.
  std::vector<double> snapshot_times;
};

AdaptiveReport run_adaptive_experiment(const ProblemSpec& prob, const AdaptiveExperimentConfig& cfg);

/// Uniform run of degree r whose dim(V) * T matches total_dof.
UniformComparison matched_uniform_run(const ProblemSpec& prob, int degree, long total_dof, double k,
                                      const EstimatorOptions& est = {});

nlohmann::json solution_snapshot(double t, const FeFunction& u);

/// Final-time reference: uniform degree-1 run with `elements` cells and `steps` steps
/// (sine-transform path when applicable).
FeFunction observable_reference(const ProblemSpec& prob, int elements, int steps);

struct ObservableDistances {
  double density = 0.0;
  double current = 0.0;
};
ObservableDistances observable_distances(const FeFunction& u, const FeFunction& reference);

std::string adaptive_csv_header();
std::string adaptive_csv_row(const StepRecord& r);
std::string trajectory_csv_header();
std::string trajectory_csv_row(const TrajectoryPoint& p);
std::string events_log(const std::vector<AdaptEvent>& events);
/// x, N, J on the given points.
std::string observables_csv(const FeFunction& u, const std::vector<double>& grid);

}  // namespace cnfe
