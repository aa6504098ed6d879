#include "cnfe/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace cnfe {

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// h^3 |[w']|^2 at the interior breakpoints of `mesh`, split evenly between the two neighbours.
template <typename Slope>
void add_jumps(const Mesh1D& mesh, Slope&& slope_jump, std::vector<double>& sq) {
  for (std::size_t e = 1; e < mesh.size(); ++e) {
    const double h = 0.5 * (mesh.width(e - 1) + mesh.width(e));
    const double j = std::norm(slope_jump(e, mesh.left(e))) * h * h * h;
    sq[e - 1] += 0.5 * j;
    sq[e] += 0.5 * j;
  }
}

Complex slope_from_right(const FeFunction& u, double x) { return u.eval_in(u.space().mesh().locate(x), x, 1); }

Complex slope_from_left(const FeFunction& u, double x) {
  const auto& m = u.space().mesh();
  std::size_t e = m.locate(x);
  if (e > 0 && m.left(e) == x) --e;
  return u.eval_in(e, x, 1);
}

}  // namespace

std::vector<double> eta_sq_per_element(const FeFunction& u, const FeFunction& lap_u, const EtaOptions& opt) {
  const Mesh1D& mesh = u.space().mesh();
  Expr e;
  e.add(u, 1.0, 2).add(lap_u, -1.0);
  auto sq = l2_norm_sq_per_element(e, mesh, u.space().quad_points());
  for (std::size_t k = 0; k < sq.size(); ++k) {
    const double h = mesh.width(k);
    sq[k] *= h * h * h * h;
  }
  if (opt.jumps) {
    add_jumps(mesh, [&u](std::size_t e, double x) { return u.eval_in(e, x, 1) - u.eval_in(e - 1, x, 1); }, sq);
  }
  return sq;
}

double eta_space(const FeFunction& u, const FeFunction& lap_u, const EtaOptions& opt) {
  return std::sqrt(sum(eta_sq_per_element(u, lap_u, opt)));
}

double eta_space(const FeFunction& u, const SpaceOperators& ops, const EtaOptions& opt) {
  return eta_space(u, discrete_laplacian(u, ops), opt);
}

PairIndicator eta_pair_sq_per_element(const FeFunction& u_new, const FeFunction& lap_new, const FeFunction& u_prev,
                                      const FeFunction& lap_prev, const EtaOptions& opt) {
  PairIndicator out;
  const Mesh1D& mn = u_new.space().mesh();
  const Mesh1D& mp = u_prev.space().mesh();
  out.coarse = mn == mp ? u_new.space().mesh_ptr() : common_coarsening(mn, mp);
  Expr e;
  e.add(u_new, 1.0, 2).add(lap_new, -1.0).add(u_prev, -1.0, 2).add(lap_prev, 1.0);
  const int q = std::max(u_new.space().quad_points(), u_prev.space().quad_points());
  out.sq = l2_norm_sq_per_element(e, *out.coarse, q);
  for (std::size_t k = 0; k < out.sq.size(); ++k) {
    const double h = out.coarse->width(k);
    out.sq[k] *= h * h * h * h;
  }
  if (opt.jumps) {
    add_jumps(
        *out.coarse,
        [&](std::size_t, double x) {
          return (slope_from_right(u_new, x) - slope_from_left(u_new, x)) -
                 (slope_from_right(u_prev, x) - slope_from_left(u_prev, x));
        },
        out.sq);
  }
  return out;
}

double eta_space_pair(const FeFunction& u_new, const FeFunction& lap_new, const FeFunction& u_prev,
                      const FeFunction& lap_prev, const EtaOptions& opt) {
  return std::sqrt(sum(eta_pair_sq_per_element(u_new, lap_new, u_prev, lap_prev, opt).sq));
}

PotentialStats potential_stats(const ProblemSpec& prob, double t_mid, double t_prev, double t_next,
                               const SplineSpace& space) {
  if (prob.g_constant) return {*prob.g_constant, 0.0};
  std::vector<double> xs = space.mesh().breakpoints();
  for (std::size_t e = 0; e < static_cast<std::size_t>(space.elements()); ++e) {
    for (int p = 0; p < space.quad_points(); ++p) xs.push_back(space.qp_x(e, p));
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : xs) {
    const double v = prob.g(x, t_mid);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  PotentialStats s;
  s.gbar = 0.5 * (hi + lo);
  std::vector<double> ts{t_mid};
  if (prob.g_time_dependent) {
    ts.push_back(t_prev);
    ts.push_back(t_next);
    for (int j = 1; j <= 8; ++j) ts.push_back(t_prev + (t_next - t_prev) * j / 9.0);
  }
  for (double t : ts) {
    for (double x : xs) s.p = std::max(s.p, std::abs(prob.g(x, t) - s.gbar));
  }
  return s;
}

StepEstimators step_estimators(const StepState& state, const StepResult& r, const ProblemSpec& prob,
                               const EstimatorOptions& opt, double eta_prev) {
  const double k = r.k, tm = r.t_mid();
  const SpaceOperators& ops = *r.ops;
  StepEstimators s;
  s.t = r.t_new();
  s.k = k;
  s.dim = ops.space->dim();
  s.stats = potential_stats(prob, tm, r.t_prev, r.t_new(), *ops.space);

  const FeFunction lap_wbar = discrete_laplacian(r.wbar, ops);
  s.eta_u_sq = eta_sq_per_element(r.u_new, r.lap_new, opt.eta);
  s.eta_wbar_sq = eta_sq_per_element(r.wbar, lap_wbar, opt.eta);
  s.eta_u = std::sqrt(sum(s.eta_u_sq));
  s.eta_wbar = std::sqrt(sum(s.eta_wbar_sq));
  s.norm_wbar = l2_norm(Expr(r.wbar));
  if (eta_prev < 0.0) eta_prev = eta_space(state.u_prev, state.lap_prev, opt.eta);

  auto op_norm = [&](double t) {
    Expr e;
    e.add(lap_wbar, -prob.alpha).add_weighted(r.wbar, [&prob, t](double x) { return prob.g(x, t); });
    return l2_norm(e);
  };
  double time_integral = 0.0;
  if (opt.gauss_time) {
    static const GaussRule rule(3);
    for (int j = 0; j < rule.size(); ++j) {
      const double tau = rule.nodes[j];
      time_integral += k * rule.weights[j] * (0.5 * k * k * tau * (1 - tau)) * op_norm(r.t_prev + tau * k);
    }
  } else {
    // exact weight integral: int (t_n - t)(t - t_{n-1}) / 2 dt = k^3 / 12
    time_integral = k * k * k / 12.0 * op_norm(tm);
  }

  s.zeta_T0 = k * k / 8.0 * (s.norm_wbar + opt.C * s.eta_wbar);
  s.zeta_T1 = time_integral + opt.C * k * k * k / 24.0 * s.stats.p * s.eta_wbar;
  s.zeta_S0 = opt.C * s.eta_u;
  s.zeta_S1 = opt.C * k * k / 4.0 * s.eta_wbar;
  s.zeta_S2 = opt.C * k / 2.0 * s.stats.p * (eta_prev + s.eta_u);
  s.pair = eta_pair_sq_per_element(r.u_new, r.lap_new, state.u_prev, state.lap_prev, opt.eta);
  s.zeta_S3 = opt.C_hat * std::sqrt(sum(s.pair.sq));

  if (!r.refines_prev) {
    const Complex half_ia(0.0, 0.5 * prob.alpha);
    Expr e;
    e.add(state.u_prev, 1.0 / k).add(state.lap_prev, half_ia).add(r.pi_u_prev, -1.0 / k).add(r.pi_lap_prev, -half_ia);
    s.zeta_C = k * l2_norm(e);
  }

  Expr dg;
  auto g_half = [&prob, tm](double x) { return 0.5 * prob.g(x, tm); };
  dg.add(r.pgu_mid).add_weighted(state.u_prev, g_half, -1.0).add_weighted(r.u_new, g_half, -1.0);
  double d = l2_norm(dg);
  if (prob.has_source()) {
    Expr df;
    df.add_field([&prob, tm](double x) { return prob.f(x, tm); }).add(r.pf_mid, -1.0);
    d += l2_norm(df);
  }
  s.zeta_D = k * d;
  return s;
}

InitialEstimators initial_estimators(const ProblemSpec& prob, const StepState& s0, const EtaOptions& opt) {
  Expr e;
  e.add_field(prob.u0).add(s0.u_prev, -1.0);
  return {l2_norm(e), eta_space(s0.u_prev, s0.lap_prev, opt)};
}

EstimatorTotals::EstimatorTotals(const InitialEstimators& init) : init_(init), S0_(init.eta0) {}

void EstimatorTotals::accumulate(const StepEstimators& s) {
  if (s.t - s.k < t_ - 1e-9 * std::max(1.0, std::abs(t_))) throw Error("estimators: steps accumulated out of order");
  ++steps_;
  t_ = s.t;
  T0_ = std::max(T0_, s.zeta_T0);
  S0_ = std::max(S0_, s.zeta_S0);
  T1_ += s.zeta_T1;
  S1_ += s.zeta_S1;
  S2_ += s.zeta_S2;
  S3_ += s.zeta_S3;
  C_ += s.zeta_C;
  D_ += s.zeta_D;
  max_T1_ = std::max(max_T1_, s.zeta_T1);
  max_S1_ = std::max(max_S1_, s.zeta_S1);
  max_S2_ = std::max(max_S2_, s.zeta_S2);
  max_S3_ = std::max(max_S3_, s.zeta_S3);
  max_C_ = std::max(max_C_, s.zeta_C);
  max_D_ = std::max(max_D_, s.zeta_D);
}

double EstimatorTotals::total() const {
  return init_.init_error + init_.eta0 + T0_ + T1_ + S0_ + S1_ + S2_ + S3_ + C_ + D_;
}

double EstimatorTotals::tilde_S() const {
  return init_.init_error + init_.eta0 + S0_ + max_S1_ + max_S2_ + max_S3_ + max_C_ + max_D_;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

}  // namespace

std::string step_csv_header() { return "n,t,k,zeta_T0,zeta_T1,zeta_S0,zeta_S1,zeta_S2,zeta_S3,zeta_C,zeta_D,gbar,p,dim"; }

std::string step_csv_row(int n, const StepEstimators& s) {
  std::string row = std::to_string(n);
  for (double v : {s.t, s.k, s.zeta_T0, s.zeta_T1, s.zeta_S0, s.zeta_S1, s.zeta_S2, s.zeta_S3, s.zeta_C, s.zeta_D,
                   s.stats.gbar, s.stats.p}) {
    row += "," + fmt(v);
  }
  return row + "," + std::to_string(s.dim);
}

std::string summary_csv_header() {
  return "steps,t,init_error,eta0,E_T0,E_T1,E_S0,E_S1,E_S2,E_S3,E_C,E_D,E_total,tilde_T,tilde_S,tilde_total";
}

std::string summary_csv_row(const EstimatorTotals& t) {
  std::string row = std::to_string(t.steps());
  for (double v : {t.t(), t.init_error(), t.eta0(), t.T0(), t.T1(), t.S0(), t.S1(), t.S2(), t.S3(), t.C(), t.D(),
                   t.total(), t.tilde_T(), t.tilde_S(), t.tilde_total()}) {
    row += "," + fmt(v);
  }
  return row;
}

}  // namespace cnfe
