#include "cnfe/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cnfe {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<ElementId> ids_of(const Mesh1D& mesh, const std::vector<std::size_t>& idx) {
  std::vector<ElementId> out;
  out.reserve(idx.size());
  for (auto e : idx) out.push_back(mesh.element(e));
  return out;
}

}  // namespace

Marking mark(const std::vector<double>& indicators, double refine_fraction, double coarsen_fraction) {
  const std::size_t n = indicators.size();
  Marking m;
  if (n == 0) return m;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // descending by value, ascending index on ties
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return indicators[a] > indicators[b]; });
  const auto nr = std::min(n, static_cast<std::size_t>(std::ceil(refine_fraction * static_cast<double>(n) - 1e-12)));
  const auto nc = static_cast<std::size_t>(std::floor(coarsen_fraction * static_cast<double>(n) + 1e-12));
  std::vector<char> taken(n, 0);
  for (std::size_t i = 0; i < nr; ++i) {
    m.refine.push_back(order[i]);
    taken[order[i]] = 1;
  }
  std::vector<std::size_t> asc(n);
  std::iota(asc.begin(), asc.end(), 0);
  std::stable_sort(asc.begin(), asc.end(), [&](std::size_t a, std::size_t b) { return indicators[a] < indicators[b]; });
  for (std::size_t i = 0; i < n && m.coarsen.size() < nc; ++i) {
    if (!taken[asc[i]]) m.coarsen.push_back(asc[i]);
  }
  std::sort(m.refine.begin(), m.refine.end());
  std::sort(m.coarsen.begin(), m.coarsen.end());
  return m;
}

std::vector<double> element_indicators(const StepResult& result, const StepEstimators& est) {
  const Mesh1D& mesh = result.ops->space->mesh();
  const std::size_t n = mesh.size();
  std::vector<double> sq(n, 0.0);
  const double w = 0.25 * result.k * result.k;
  for (std::size_t e = 0; e < n; ++e) {
    if (e < est.eta_u_sq.size()) sq[e] += est.eta_u_sq[e];
    if (e < est.eta_wbar_sq.size()) sq[e] += w * w * est.eta_wbar_sq[e];
  }
  if (est.pair.coarse && !est.pair.sq.empty()) {
    const Mesh1D& coarse = *est.pair.coarse;
    std::size_t j = 0;
    for (std::size_t e = 0; e < n; ++e) {
      const ElementId& id = mesh.element(e);
      while (j < coarse.size() && !coarse.element(j).is_ancestor_of(id)) ++j;
      if (j == coarse.size()) break;
      const double share = mesh.width(e) / coarse.width(j);
      sq[e] += share * est.pair.sq[j];
    }
  }
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

MeshPtr adapt_mesh(const Mesh1D& mesh, const Marking& m) {
  MeshPtr refined = refine(mesh, ids_of(mesh, m.refine));
  if (m.coarsen.empty()) return refined;
  return coarsen(*refined, ids_of(mesh, m.coarsen));
}

AdaptiveDriver::AdaptiveDriver(const ProblemSpec& prob, AdaptiveConfig cfg)
    : prob_(prob), cfg_(std::move(cfg)), stepper_(prob) {
  if (!(cfg_.delta1 > 0.0 && cfg_.delta1 < 1.0) || !(cfg_.delta2 > 1.0) || !(cfg_.theta1 > 0.0 && cfg_.theta1 < 1.0) ||
      !(cfg_.theta2 > 0.0 && cfg_.theta2 < cfg_.theta1)) {
    throw Error("adaptive: invalid delta/theta parameters");
  }
  if (!(cfg_.space_trigger > 0.0 && cfg_.space_trigger <= 1.0)) throw Error("adaptive: space_trigger must be in (0, 1]");
  if (!(cfg_.tol_S > 0.0) || !(cfg_.tol_T > 0.0) || !(cfg_.k0 > 0.0)) throw Error("adaptive: tolerances and k0 must be positive");
  if (cfg_.k_min <= 0.0) cfg_.k_min = 1e-12 * prob_.T;
  k_next_ = cfg_.k0;
  adapt_initial_grid();
}

void AdaptiveDriver::log(std::string action, std::string payload) {
  events_.push_back({n_, std::move(action), std::move(payload)});
}

void AdaptiveDriver::adapt_initial_grid() {
  const double scale = cfg_.observable_mode ? prob_.eps.value_or(1.0) : 1.0;
  const double rf = cfg_.initial_refine_fraction > 0.0 ? cfg_.initial_refine_fraction : cfg_.refine_fraction;
  MeshPtr mesh = Mesh1D::uniform(prob_.a, prob_.b, cfg_.initial_elements);
  for (int it = 0;; ++it) {
    auto ops = make_operators(SplineSpace::make(mesh, cfg_.degree, cfg_.quad_points));
    state_ = initial_state(prob_, ops);
    init_ = initial_estimators(prob_, state_, cfg_.est.eta);
    if (scale * init_.init_error + cfg_.est.C * init_.eta0 <= cfg_.space_trigger * cfg_.tol_S) break;
    if (it >= cfg_.max_initial_iters) {
      throw Error("adaptive: initial grid not resolved after " + std::to_string(it) + " iterations (zeta_I = " +
                  fmt(init_.init_error + init_.eta0) + ")");
    }
    Expr diff;
    diff.add_field(prob_.u0).add(state_.u_prev, -1.0);
    auto err_sq = l2_norm_sq_per_element(diff, *mesh, cfg_.quad_points);
    auto eta_sq = eta_sq_per_element(state_.u_prev, state_.lap_prev, cfg_.est.eta);
    std::vector<double> ind(mesh->size());
    for (std::size_t e = 0; e < ind.size(); ++e) {
      ind[e] = std::sqrt(scale * scale * err_sq[e] + cfg_.est.C * cfg_.est.C * eta_sq[e]);
    }
    Marking m = mark(ind, rf, 0.0);
    mesh = adapt_mesh(*mesh, m);
    log("initial-refine", std::to_string(m.refine.size()) + " elements -> " + std::to_string(mesh->size()));
  }
  init_.eta0 *= cfg_.est.C;
  totals_ = EstimatorTotals(init_);
  eta_prev_ = -1.0;
}

bool AdaptiveDriver::done() const { return state_.t_prev >= prob_.T * (1.0 - 1e-12); }

AdaptiveDriver::Trial AdaptiveDriver::solve(double k, const OperatorsPtr& ops) {
  Trial tr;
  tr.result = stepper_.step(state_, k, ops, cfg_.check_midpoint);
  tr.est = step_estimators(state_, tr.result, prob_, cfg_.est, eta_prev_);
  const auto& s = tr.est;
  const double e = cfg_.observable_mode ? prob_.eps.value_or(1.0) : 1.0;
  tr.zT = s.zeta_T0 + e * s.zeta_T1;
  tr.zS = s.zeta_S0 + e * (s.zeta_S1 + s.zeta_S2 + s.zeta_S3 + s.zeta_C + s.zeta_D);
  return tr;
}

const StepRecord& AdaptiveDriver::advance() {
  if (done()) throw Error("adaptive: final time already reached");
  ++n_;
  const double remaining = prob_.T - state_.t_prev;
  double k = std::min(k_next_, remaining);
  bool clipped = k_next_ >= remaining;
  OperatorsPtr ops = state_.ops;
  Trial tr = solve(k, ops);
  int time_iters = 0, space_iters = 0;

  auto time_loop = [&]() {
    if (!cfg_.adapt_time) return;
    while (tr.zT > cfg_.theta1 * cfg_.tol_T) {
      if (++time_iters > cfg_.max_inner_iters) {
        throw Error("adaptive: step " + std::to_string(n_) + ": time loop exceeded " +
                    std::to_string(cfg_.max_inner_iters) + " iterations (zeta_T = " + fmt(tr.zT) + ")");
      }
      const double k_old = k;
      k *= cfg_.delta1;
      clipped = false;
      if (k < cfg_.k_min) {
        throw Error("adaptive: step " + std::to_string(n_) + ": time step " + fmt(k) + " below k_min (zeta_T = " +
                    fmt(tr.zT) + ")");
      }
      tr = solve(k, ops);
      log("shrink-k", fmt(k_old) + " -> " + fmt(k));
    }
  };

  time_loop();
  bool changed = false;
  while (tr.zS > cfg_.tol_S || (!changed && tr.zS > cfg_.space_trigger * cfg_.tol_S)) {
    if (++space_iters > cfg_.max_inner_iters) {
      throw Error("adaptive: step " + std::to_string(n_) + ": space loop exceeded " +
                  std::to_string(cfg_.max_inner_iters) + " iterations (zeta_S = " + fmt(tr.zS) +
                  ", zeta_T = " + fmt(tr.zT) + ")");
    }
    const Mesh1D& mesh = ops->space->mesh();
    Marking m = mark(element_indicators(tr.result, tr.est), cfg_.refine_fraction, changed ? 0.0 : cfg_.coarsen_fraction);
    if (!m.refine.empty() || !m.coarsen.empty()) {
      MeshPtr next = adapt_mesh(mesh, m);
      const std::size_t before = mesh.size();
      if (!m.refine.empty()) log("refine", std::to_string(m.refine.size()) + " elements");
      if (!m.coarsen.empty()) {
        const std::size_t merged = before + m.refine.size() - next->size();
        log("coarsen", std::to_string(m.coarsen.size()) + " marked, " + std::to_string(merged) + " pairs merged");
      }
      ops = make_operators(SplineSpace::make(next, cfg_.degree, cfg_.quad_points));
      changed = true;
      tr = solve(k, ops);
    }
    time_loop();
  }

  if (cfg_.check_midpoint) {
    FeFunction res = *tr.result.wmid;
    for (int i = 0; i < res.dim(); ++i) {
      res.coeffs()[i] += (tr.result.u_new.coeffs()[i] - tr.result.pi_u_prev.coeffs()[i]) / k;
    }
    const double scale = std::max(l2_norm(Expr(tr.result.u_new)), 1e-300);
    midpoint_residual_ = std::max(midpoint_residual_, l2_norm(Expr(res)) * k / scale);
  }

  StepRecord rec;
  rec.n = n_;
  rec.k = k;
  rec.t = tr.result.t_new();
  if (clipped) rec.t = prob_.T;
  rec.dim = ops->space->dim();
  rec.time_iters = time_iters;
  rec.space_iters = space_iters;
  rec.clipped = clipped;
  rec.zeta_T = tr.zT;
  rec.zeta_S = tr.zS;
  rec.est = tr.est;
  rec.est.eta_u_sq.clear();
  rec.est.eta_wbar_sq.clear();
  rec.est.pair = {};
  totals_.accumulate(rec.est);

  eta_prev_ = tr.est.eta_u;
  state_ = CnStepper::next_state(tr.result);
  if (clipped) state_.t_prev = prob_.T;

  k_next_ = k;
  if (cfg_.adapt_time && tr.zT <= cfg_.theta2 * cfg_.tol_T) {
    k_next_ = cfg_.delta2 * k;
    log("grow-k", fmt(k) + " -> " + fmt(k_next_));
  }
  records_.push_back(std::move(rec));
  return records_.back();
}

void AdaptiveDriver::run() {
  while (!done()) advance();
}

long AdaptiveDriver::total_dof() const {
  double s = 0.0;
  for (const auto& r : records_) s += r.k * r.dim;
  return static_cast<long>(std::floor(s)) + 1;
}

}  // namespace cnfe
