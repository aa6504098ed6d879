#pragma once

#include <string>
#include <vector>

#include "cnfe/scheme.hpp"

namespace cnfe {

struct EtaOptions {
  /// Add h^3 |[u']|^2 at interior breakpoints (off by default in 1D).
  bool jumps = false;
};

/// Elementwise h_K^4 ||u'' - lap_u||_K^2 (+ jump share), lap_u the discrete Laplacian of u.
std::vector<double> eta_sq_per_element(const FeFunction& u, const FeFunction& lap_u, const EtaOptions& opt = {});
double eta_space(const FeFunction& u, const FeFunction& lap_u, const EtaOptions& opt = {});
double eta_space(const FeFunction& u, const SpaceOperators& ops, const EtaOptions& opt = {});

/// Contributions on the elements of common_coarsening(new mesh, prev mesh).
struct PairIndicator {
  MeshPtr coarse;
  std::vector<double> sq;
};
PairIndicator eta_pair_sq_per_element(const FeFunction& u_new, const FeFunction& lap_new, const FeFunction& u_prev,
                                      const FeFunction& lap_prev, const EtaOptions& opt = {});
double eta_space_pair(const FeFunction& u_new, const FeFunction& lap_new, const FeFunction& u_prev,
                      const FeFunction& lap_prev, const EtaOptions& opt = {});

struct PotentialStats {
  double gbar = 0.0;
  double p = 0.0;
};

/// gbar from sup/inf of g(., t_mid) over Gauss points and breakpoints of the
/// space; p = max |g - gbar| over the same points and 11 times in [t_prev, t_next].
PotentialStats potential_stats(const ProblemSpec& prob, double t_mid, double t_prev, double t_next,
                               const SplineSpace& space);

struct EstimatorOptions {
  double C = 1.0;
  double C_hat = 1.0;
  EtaOptions eta;
  /// Three-point Gauss rule in time for the second time estimator instead of the midpoint rule.
  bool gauss_time = false;
};

struct StepEstimators {
  double t = 0.0;
  double k = 0.0;
  int dim = 0;
  double zeta_T0 = 0.0, zeta_T1 = 0.0;
  double zeta_S0 = 0.0, zeta_S1 = 0.0, zeta_S2 = 0.0, zeta_S3 = 0.0;
  double zeta_C = 0.0, zeta_D = 0.0;
  PotentialStats stats;
  // ingredients reused by the adaptive driver
  double eta_u = 0.0;
  double eta_wbar = 0.0;
  double norm_wbar = 0.0;
  std::vector<double> eta_u_sq;     // per element of V^n
  std::vector<double> eta_wbar_sq;  // per element of V^n
  PairIndicator pair;

  double zeta_T() const { return zeta_T0 + zeta_T1; }
  double zeta_S() const { return zeta_S0 + zeta_S1 + zeta_S2 + zeta_S3 + zeta_C + zeta_D; }
};

/// All local quantities of one completed step. `eta_prev` may carry
/// eta(U^{n-1}) from the previous step to avoid recomputation (negative: recompute).
StepEstimators step_estimators(const StepState& state, const StepResult& result, const ProblemSpec& prob,
                               const EstimatorOptions& opt = {}, double eta_prev = -1.0);

struct InitialEstimators {
  double init_error = 0.0;  // ||u0 - U^0||
  double eta0 = 0.0;        // eta(U^0)
};
InitialEstimators initial_estimators(const ProblemSpec& prob, const StepState& s0, const EtaOptions& opt = {});

class EstimatorTotals {
 public:
  EstimatorTotals() = default;
  explicit EstimatorTotals(const InitialEstimators& init);

  void accumulate(const StepEstimators& s);

  int steps() const { return steps_; }
  double t() const { return t_; }
  double init_error() const { return init_.init_error; }
  double eta0() const { return init_.eta0; }
  double T0() const { return T0_; }
  double T1() const { return T1_; }
  double S0() const { return S0_; }
  double S1() const { return S1_; }
  double S2() const { return S2_; }
  double S3() const { return S3_; }
  double C() const { return C_; }
  double D() const { return D_; }
  double total() const;
  double tilde_T() const { return T0_ + max_T1_; }
  double tilde_S() const;
  double tilde_total() const { return tilde_T() + tilde_S(); }

 private:
  InitialEstimators init_;
  int steps_ = 0;
  double t_ = 0.0;
  double T0_ = 0, T1_ = 0, S0_ = 0, S1_ = 0, S2_ = 0, S3_ = 0, C_ = 0, D_ = 0;
  double max_T1_ = 0, max_S1_ = 0, max_S2_ = 0, max_S3_ = 0, max_C_ = 0, max_D_ = 0;
};

std::string step_csv_header();
std::string step_csv_row(int n, const StepEstimators& s);
std::string summary_csv_header();
std::string summary_csv_row(const EstimatorTotals& t);

}  // namespace cnfe
