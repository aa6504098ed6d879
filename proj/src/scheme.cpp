#include "cnfe/scheme.hpp"

namespace cnfe {

namespace {

const Complex I(0.0, 1.0);

RealField at_time(const SpaceTimeReal& g, double t, double scale = 1.0) {
  return [&g, t, scale](double x) { return scale * g(x, t); };
}

}  // namespace

StepState initial_state(const ProblemSpec& prob, OperatorsPtr ops) {
  auto u0 = l2_project_field(*ops, prob.u0);
  auto lap = discrete_laplacian(u0, *ops);
  return {0.0, std::move(ops), std::move(u0), std::move(lap)};
}

const BandLU& CnStepper::system(const OperatorsPtr& ops_ptr, double k, double t_mid) {
  const SpaceOperators& ops = *ops_ptr;
  const bool hit = cached_ops_ == ops_ptr && cached_k_ == k && (!prob_.g_time_dependent || cached_t_ == t_mid);
  if (!hit) {
    const BandedMatrix b = weighted_mass_matrix(*ops.space, prob_.g, t_mid);
    const BandedMatrix a =
        BandedMatrix::combine({{1.0 / k, &ops.mass}, {0.5 * I * prob_.alpha, &ops.stiffness}, {0.5 * I, &b}});
    lu_ = BandLU(a);
    cached_ops_ = ops_ptr;
    cached_k_ = k;
    cached_t_ = t_mid;
  }
  return lu_;
}

StepResult CnStepper::step(const StepState& state, double k, const OperatorsPtr& ops_new, bool keep_w) {
  if (!(k > 0.0)) throw Error("scheme: time step must be positive");
  const SpaceOperators& ops = *ops_new;
  const double t0 = state.t_prev, tm = t0 + 0.5 * k;
  const double alpha = prob_.alpha;
  const auto& g = prob_.g;
  const FeFunction& up = state.u_prev;
  const FeFunction& lp = state.lap_prev;

  StepResult r;
  r.t_prev = t0;
  r.k = k;
  r.ops = ops_new;
  r.space_changed = !same_space(up.space_ptr(), ops.space);
  r.refines_prev = !r.space_changed || is_refinement_of(ops.space->mesh(), up.space().mesh());

  std::function<Complex(double)> f_mid, f_0;
  if (prob_.has_source()) {
    f_mid = [this, tm](double x) { return prob_.f(x, tm); };
    f_0 = [this, t0](double x) { return prob_.f(x, t0); };
  }

  Expr rhs;
  rhs.add(up, 1.0 / k).add(lp, 0.5 * I * alpha).add_weighted(up, at_time(g, tm), -0.5 * I);
  if (f_mid) rhs.add_field(f_mid);
  auto c = load_vector(*ops.space, rhs);
  system(ops_new, k, tm).solve_in_place(c);
  r.u_new = FeFunction(ops.space, std::move(c));
  r.lap_new = discrete_laplacian(r.u_new, ops);
  r.pi_u_prev = project_between(up, ops);
  r.pi_lap_prev = project_between(lp, ops);

  Expr gu;
  gu.add_weighted(up, at_time(g, tm, 0.5)).add_weighted(r.u_new, at_time(g, tm, 0.5));
  r.pgu_mid = l2_project(ops, gu);
  if (f_mid) r.pf_mid = l2_project_field(ops, f_mid);

  // (2/k)[ i alpha (Theta_mid - Theta_0) + i P(G_mid - G_0) - P(F_mid - F_0) ],
  // Theta_mid - Theta_0 = (Pi lap_prev - lap_new) / 2
  Expr dg;
  dg.add_weighted(up, [&g, tm, t0](double x) { return 0.5 * g(x, tm) - g(x, t0); });
  dg.add_weighted(r.u_new, at_time(g, tm, 0.5));
  if (f_mid) {
    dg.add_field(f_mid, I);
    dg.add_field(f_0, -I);
  }
  FeFunction wbar = l2_project(ops, dg);
  wbar *= I;
  for (int i = 0; i < wbar.dim(); ++i) {
    wbar.coeffs()[i] += 0.5 * I * alpha * (r.pi_lap_prev.coeffs()[i] - r.lap_new.coeffs()[i]);
  }
  wbar *= 2.0 / k;
  r.wbar = std::move(wbar);

  if (keep_w) {
    // W(t_{n-1}) = -i alpha Pi lap_prev + i P(g_0 U^{n-1}) - P f_0
    Expr e0;
    e0.add_weighted(up, at_time(g, t0), I);
    if (f_0) e0.add_field(f_0, -1.0);
    FeFunction w0 = l2_project(ops, e0);
    FeFunction wm = I * r.pgu_mid;
    for (int i = 0; i < w0.dim(); ++i) {
      w0.coeffs()[i] -= I * alpha * r.pi_lap_prev.coeffs()[i];
      wm.coeffs()[i] -= 0.5 * I * alpha * (r.pi_lap_prev.coeffs()[i] + r.lap_new.coeffs()[i]);
      if (f_mid) wm.coeffs()[i] -= r.pf_mid.coeffs()[i];
    }
    r.w0 = std::move(w0);
    r.wmid = std::move(wm);
  }
  return r;
}

}  // namespace cnfe
