#include "cnfe/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cnfe {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

}  // namespace

UniformResult run_uniform_auto(const ProblemSpec& prob, const UniformConfig& cfg, const ErrorProbe& probe) {
  if (!probe && !cfg.check_midpoint && spectral_applicable(prob, cfg)) return run_uniform_spectral(prob, cfg);
  return run_uniform(prob, cfg, probe);
}

std::vector<SensitivityRow> run_sensitivity(const std::string& problem, int degree,
                                            const std::vector<SensitivityPoint>& points) {
  std::vector<SensitivityRow> rows;
  for (const auto& pt : points) {
    CatalogOptions opts;
    opts.eps = pt.eps;
    const ProblemSpec prob = catalog(problem, opts);
    UniformConfig cfg;
    cfg.degree = degree;
    cfg.elements = pt.elements;
    cfg.steps = pt.steps;
    cfg.keep_steps = false;
    SensitivityRow row;
    row.point = pt;
    row.h = (prob.b - prob.a) / pt.elements;
    row.k = prob.T / pt.steps;
    row.spectral = spectral_applicable(prob, cfg);
    UniformResult r = run_uniform_auto(prob, cfg);
    row.totals = r.totals;
    row.seconds = r.seconds;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SensitivityPoint> k_equals_h(const ProblemSpec& prob, const std::vector<double>& hs) {
  std::vector<SensitivityPoint> out;
  for (double h : hs) {
    out.push_back({prob.eps.value_or(1.0), static_cast<int>(std::lround((prob.b - prob.a) / h)),
                   static_cast<int>(std::lround(prob.T / h))});
  }
  return out;
}

std::vector<SensitivityPoint> fixed_k_sweep(const ProblemSpec& prob, double k, const std::vector<int>& elements) {
  std::vector<SensitivityPoint> out;
  const int steps = static_cast<int>(std::lround(prob.T / k));
  for (int m : elements) out.push_back({prob.eps.value_or(1.0), m, steps});
  return out;
}

std::vector<SensitivityPoint> fixed_m_sweep(const ProblemSpec& prob, int elements, const std::vector<double>& ks) {
  std::vector<SensitivityPoint> out;
  for (double k : ks) out.push_back({prob.eps.value_or(1.0), elements, static_cast<int>(std::lround(prob.T / k))});
  return out;
}

std::string sensitivity_csv_header() {
  return "eps,M,N,h,k,E_S0,E_S1,E_S2,E_S3,E_T0,E_T1,E_C,E_D,E_total,seconds,spectral";
}

std::string sensitivity_csv_row(const SensitivityRow& r) {
  std::string row = fmt(r.point.eps) + "," + std::to_string(r.point.elements) + "," + std::to_string(r.point.steps);
  const auto& t = r.totals;
  for (double v : {r.h, r.k, t.S0(), t.S1(), t.S2(), t.S3(), t.T0(), t.T1(), t.C(), t.D(), t.total(), r.seconds}) {
    row += "," + fmt(v);
  }
  return row + "," + (r.spectral ? "1" : "0");
}

std::vector<TrajectoryPoint> trajectory_of(const InitialEstimators& init, const std::vector<StepEstimators>& steps) {
  EstimatorTotals totals(init);
  std::vector<TrajectoryPoint> out;
  out.reserve(steps.size());
  for (const auto& s : steps) {
    totals.accumulate(s);
    out.push_back({s.t, s.k, s.dim, totals.tilde_T(), totals.tilde_S(), totals.total()});
  }
  return out;
}

nlohmann::json solution_snapshot(double t, const FeFunction& u) {
  return {{"t", t}, {"mesh", to_json(u.space().mesh())}, {"solution", coeffs_to_json(u)}};
}

AdaptiveReport run_adaptive_experiment(const ProblemSpec& prob, const AdaptiveExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  AdaptiveReport rep;
  AdaptiveDriver driver(prob, cfg.adaptive);
  rep.initial_u = driver.state().u_prev;
  std::size_t next_snap = 0;
  while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] <= 0.0) {
    rep.snapshots.push_back(solution_snapshot(0.0, rep.initial_u));
    ++next_snap;
  }
  while (!driver.done()) {
    const StepRecord& r = driver.advance();
    const auto& t = driver.totals();
    rep.trajectory.push_back({r.t, r.k, r.dim, t.tilde_T(), t.tilde_S(), t.total()});
    while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] <= r.t + 1e-12 * prob.T) {
      rep.snapshots.push_back(solution_snapshot(r.t, driver.state().u_prev));
      ++next_snap;
    }
  }
  rep.records = driver.records();
  rep.events = driver.events();
  rep.initial = driver.initial();
  rep.totals = driver.totals();
  rep.total_dof = driver.total_dof();
  rep.final_u = driver.state().u_prev;
  for (auto it = rep.records.rbegin(); it != rep.records.rend(); ++it) {
    if (!it->clipped) {
      rep.settled_k = it->k;
      break;
    }
  }
  if (rep.settled_k == 0.0 && !rep.records.empty()) rep.settled_k = rep.records.back().k;
  if (cfg.compare_uniform) {
    rep.uniform = matched_uniform_run(prob, cfg.adaptive.degree, rep.total_dof, rep.settled_k, cfg.adaptive.est);
  }
  rep.seconds = seconds_since(start);
  return rep;
}

UniformComparison matched_uniform_run(const ProblemSpec& prob, int degree, long total_dof, double k,
                                      const EstimatorOptions& est) {
  UniformComparison out;
  const int dim = static_cast<int>(std::lround(static_cast<double>(total_dof) / prob.T));
  out.elements = std::max(1, dim - degree + 2);
  out.steps = std::max(1, static_cast<int>(std::lround(prob.T / k)));
  UniformConfig cfg;
  cfg.degree = degree;
  cfg.elements = out.elements;
  cfg.steps = out.steps;
  cfg.est = est;
  UniformResult r = run_uniform_auto(prob, cfg);
  out.k = r.k;
  out.total_dof = static_cast<long>(std::floor(prob.T * (out.elements + degree - 2))) + 1;
  out.totals = r.totals;
  InitialEstimators init{r.totals.init_error(), r.totals.eta0()};
  out.trajectory = trajectory_of(init, r.log);
  out.final_u = r.final_u;
  out.seconds = r.seconds;
  return out;
}

FeFunction observable_reference(const ProblemSpec& prob, int elements, int steps) {
  UniformConfig cfg;
  cfg.degree = 1;
  cfg.elements = elements;
  cfg.steps = steps;
  cfg.keep_steps = false;
  return run_uniform_auto(prob, cfg).final_u;
}

ObservableDistances observable_distances(const FeFunction& u, const FeFunction& reference) {
  const PointwiseObservable density = [](Complex v, Complex) { return std::norm(v); };
  const PointwiseObservable current = [](Complex v, Complex dv) { return std::imag(std::conj(v) * dv); };
  return {l2_distance(u, reference, density), l2_distance(u, reference, current)};
}

std::string adaptive_csv_header() { return "step,t_n,k_n,dim,time_iters,space_iters,zeta_T,zeta_S," + step_csv_header(); }

std::string adaptive_csv_row(const StepRecord& r) {
  return std::to_string(r.n) + "," + fmt(r.t) + "," + fmt(r.k) + "," + std::to_string(r.dim) + "," +
         std::to_string(r.time_iters) + "," + std::to_string(r.space_iters) + "," + fmt(r.zeta_T) + "," +
         fmt(r.zeta_S) + "," + step_csv_row(r.n, r.est);
}

std::string trajectory_csv_header() { return "t,k,dim,tilde_T,tilde_S,total"; }

std::string trajectory_csv_row(const TrajectoryPoint& p) {
  return fmt(p.t) + "," + fmt(p.k) + "," + std::to_string(p.dim) + "," + fmt(p.tilde_T) + "," + fmt(p.tilde_S) +
         "," + fmt(p.total);
}

std::string events_log(const std::vector<AdaptEvent>& events) {
  std::ostringstream os;
  for (const auto& e : events) os << e.n << ' ' << e.action << ' ' << e.payload << '\n';
  return os.str();
}

std::string observables_csv(const FeFunction& u, const std::vector<double>& grid) {
  const auto n = position_density(u, grid);
  const auto j = current_density(u, grid);
  std::string out = "x,N,J\n";
  for (std::size_t i = 0; i < grid.size(); ++i) out += fmt(grid[i]) + "," + fmt(n[i]) + "," + fmt(j[i]) + "\n";
  return out;
}

}  // namespace cnfe
