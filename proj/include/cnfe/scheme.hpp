#pragma once

#include <optional>

#include "cnfe/problems.hpp"
#include "cnfe/transfer.hpp"

namespace cnfe {

/// Data carried from step n-1 into step n.
struct StepState {
  double t_prev = 0.0;
  OperatorsPtr ops;
  FeFunction u_prev;
  FeFunction lap_prev;  // discrete Laplacian of u_prev on its own space
};

/// U^0 = P^0 u0 on the given space.
StepState initial_state(const ProblemSpec& prob, OperatorsPtr ops);

struct StepResult {
  double t_prev = 0.0;
  double k = 0.0;
  OperatorsPtr ops;  // V^n
  FeFunction u_new;
  FeFunction lap_new;
  FeFunction pi_u_prev;    // Pi^n U^{n-1}
  FeFunction pi_lap_prev;  // Pi^n Delta^{n-1} U^{n-1}
  FeFunction pgu_mid;      // P^n (g(t_{n-1/2}) U^{n-1/2})
  FeFunction pf_mid;       // P^n f(t_{n-1/2}); empty without a source
  FeFunction wbar;         // (2/k)(W(t_{n-1/2}) - W(t_{n-1}))
  std::optional<FeFunction> w0;    // W(t_{n-1}), on request
  std::optional<FeFunction> wmid;  // W(t_{n-1/2}), on request
  bool space_changed = false;
  bool refines_prev = true;  // V^{n-1} is contained in V^n

  double t_new() const { return t_prev + k; }
  double t_mid() const { return t_prev + 0.5 * k; }
};

/// One modified Crank-Nicolson-Galerkin step. Keeps the factorized system
/// matrix as long as space, k and (for time-dependent g) t_{n-1/2} repeat.
class CnStepper {
 public:
  explicit CnStepper(const ProblemSpec& prob) : prob_(prob) {}

  StepResult step(const StepState& state, double k, const OperatorsPtr& ops_new, bool keep_w = false);
  static StepState next_state(const StepResult& r) { return {r.t_new(), r.ops, r.u_new, r.lap_new}; }

 private:
  const BandLU& system(const OperatorsPtr& ops, double k, double t_mid);

  const ProblemSpec& prob_;
  OperatorsPtr cached_ops_;
  double cached_k_ = 0.0;
  double cached_t_ = 0.0;
  BandLU lu_;
};

}  // namespace cnfe
