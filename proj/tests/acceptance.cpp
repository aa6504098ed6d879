// Acceptance gate: one PASS/FAIL line per criterion, details indented below it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cn_oracle.hpp"
#include "cnfe/experiments.hpp"
#include "cnfe/transfer.hpp"

using namespace cnfe;

namespace {

struct Gate {
  std::vector<std::string> lines;
  bool ok = true;

  void check(bool cond, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    lines.push_back(std::string(cond ? "    ok   " : "    MISS ") + buf);
    ok = ok && cond;
  }
  void note(const std::string& s) { lines.push_back("    " + s); }
};

double rel_dev(double value, double expect) { return std::abs(value - expect) / std::abs(expect); }

double rate(double coarse, double fine, double refinement) { return std::log(coarse / fine) / std::log(refinement); }

UniformResult uniform(const ProblemSpec& p, int degree, int elements, int steps, const ErrorProbe& probe = {}) {
  UniformConfig c;
  c.degree = degree;
  c.elements = elements;
  c.steps = steps;
  c.keep_steps = false;
  return probe ? run_uniform(p, c, probe) : run_uniform_auto(p, c);
}

void within(Gate& g, const char* what, double value, double expect, double tol) {
  g.check(rel_dev(value, expect) <= tol, "%-8s %.5e  expect %.5e  dev %+.2f%%  (tol %.0f%%)", what, value, expect,
          100 * (value - expect) / expect, 100 * tol);
}

void eoc_within(Gate& g, const char* what, double value, double expect, double tol) {
  g.check(std::abs(value - expect) <= tol, "EOC %-4s %.4f  expect %.4f  (tol %.2f)", what, value, expect, tol);
}

// Exp 1a, r = 1, k = h on [-2, 2]
Gate criterion1() {
  Gate g;
  const auto p = catalog("exp1a");
  const int ms[] = {640, 1280, 2560};
  const double S0[] = {5.0445e-04, 1.2609e-04, 3.1522e-05};
  const double S1[] = {1.3289e-02, 1.7796e-03, 2.2677e-04};
  const double S3[] = {6.1493e-02, 1.6361e-02, 4.1610e-03};
  const double T0[] = {3.1810e-02, 8.2836e-03, 2.0935e-03};
  const double T1[] = {2.3471, 6.1356e-01, 1.5524e-01};
  const double eS0[] = {2.0003, 2.0000}, eS1[] = {2.9006, 2.9722}, eS3[] = {1.9102, 1.9753};
  const double eT0[] = {1.9411, 1.9843}, eT1[] = {1.9356, 1.9827};
  std::vector<EstimatorTotals> tot;
  for (int i = 0; i < 3; ++i) {
    const int steps = ms[i] / 4;
    auto r = uniform(p, 1, ms[i], steps);
    g.note("M = " + std::to_string(ms[i]) + ", 1/k = " + std::to_string(steps));
    within(g, "E_S0", r.totals.S0(), S0[i], 0.05);
    within(g, "E_S1", r.totals.S1(), S1[i], 0.05);
    within(g, "E_S3", r.totals.S3(), S3[i], 0.05);
    within(g, "E_T0", r.totals.T0(), T0[i], 0.05);
    within(g, "E_T1", r.totals.T1(), T1[i], 0.05);
    tot.push_back(r.totals);
  }
  for (int i = 0; i < 2; ++i) {
    g.note("EOC " + std::to_string(ms[i]) + " -> " + std::to_string(ms[i + 1]));
    eoc_within(g, "S0", rate(tot[i].S0(), tot[i + 1].S0(), 2), eS0[i], 0.05);
    eoc_within(g, "S1", rate(tot[i].S1(), tot[i + 1].S1(), 2), eS1[i], 0.05);
    eoc_within(g, "S3", rate(tot[i].S3(), tot[i + 1].S3(), 2), eS3[i], 0.05);
    eoc_within(g, "T0", rate(tot[i].T0(), tot[i + 1].T0(), 2), eT0[i], 0.05);
    eoc_within(g, "T1", rate(tot[i].T1(), tot[i + 1].T1(), 2), eT1[i], 0.05);
  }
  return g;
}

// Exp 2, r = 2, closed-form solution
Gate criterion2() {
  Gate g;
  const auto p = catalog("exp2");
  const int ks[] = {80, 160, 320};
  const int ms[] = {75, 120, 185};
  const double eex[] = {6.6552e-04, 1.6474e-04, 4.1787e-05};
  const double ei[] = {399.612, 379.4525, 397.8271};
  std::vector<double> errors;
  for (int i = 0; i < 3; ++i) {
    auto r = uniform(p, 2, ms[i], ks[i], exact_error_probe(p));
    g.note("1/k = " + std::to_string(ks[i]) + ", M = " + std::to_string(ms[i]));
    within(g, "Eex", r.error, eex[i], 0.05);
    within(g, "ei", r.totals.total() / r.error, ei[i], 0.15);
    errors.push_back(r.error);
  }
  for (int i = 0; i < 2; ++i) eoc_within(g, "Eex", rate(errors[i], errors[i + 1], 2), 2.0, 0.1);
  return g;
}

// Exp 1b, r = 2
Gate criterion3() {
  Gate g;
  auto r = uniform(catalog("exp1b"), 2, 120, 160);
  g.note("M = 120, 1/k = 160");
  within(g, "E_S0", r.totals.S0(), 3.1817e-03, 0.05);
  within(g, "E_T1", r.totals.T1(), 5.6917e-02, 0.10);
  return g;
}

// eps = 0.005, r = 1, k = h
Gate criterion4() {
  Gate g;
  const auto p = catalog("sens");
  const double hs[] = {1e-4, 5e-5, 1e-5};
  const double S0[] = {5.1137e-05, 1.2784e-05, 5.1136e-07};
  const double S1[] = {2.8842e-03, 3.6194e-04, 3.2460e-06};
  const double S3[] = {5.6296e-02, 1.4128e-02, 5.6582e-04};
  const double T0[] = {2.5351e-03, 6.3615e-04, 2.5476e-05};
  const double T1[] = {1.8417, 4.6218e-01, 1.8510e-02};
  auto rows = run_sensitivity("sens", 1, k_equals_h(p, {hs[0], hs[1], hs[2]}));
  for (int i = 0; i < 3; ++i) {
    const auto& t = rows[i].totals;
    char head[64];
    std::snprintf(head, sizeof head, "k = h = %g (M = %d)", hs[i], rows[i].point.elements);
    g.note(head);
    within(g, "E_S0", t.S0(), S0[i], 0.15);
    within(g, "E_S1", t.S1(), S1[i], 0.15);
    within(g, "E_S3", t.S3(), S3[i], 0.15);
    within(g, "E_T0", t.T0(), T0[i], 0.15);
    within(g, "E_T1", t.T1(), T1[i], 0.15);
  }
  for (int i = 0; i < 2; ++i) {
    const double expect = std::pow(hs[i] / hs[i + 1], 2);
    const auto& a = rows[i].totals;
    const auto& b = rows[i + 1].totals;
    g.check(rel_dev(a.S0() / b.S0(), expect) <= 0.15, "ratio E_S0 %g -> %g: %.3f, order 2 gives %.1f (tol 15%%)",
            hs[i], hs[i + 1], a.S0() / b.S0(), expect);
    g.check(rel_dev(a.T1() / b.T1(), expect) <= 0.15, "ratio E_T1 %g -> %g: %.3f, order 2 gives %.1f (tol 15%%)",
            hs[i], hs[i + 1], a.T1() / b.T1(), expect);
  }
  return g;
}

ProblemSpec rough_problem() {
  ProblemSpec p;
  p.name = "property";
  p.a = -1;
  p.b = 1;
  p.T = 0.2;
  p.alpha = 0.4;
  p.g = [](double x, double t) { return 3 + std::cos(4 * x) * (1 + t); };
  p.g_time_dependent = true;
  p.u0 = [](double x) { return (1 - x * x) * std::exp(Complex(-8 * x * x, 6 * x)); };
  return p;
}

Gate criterion5() {
  Gate g;
  const auto p = rough_problem();

  // a. norm conservation
  double drift = 0.0;
  const int steps = 50;
  for (int r = 1; r <= 4; ++r) {
    auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(p.a, p.b, 20), r));
    StepState s = initial_state(p, ops);
    const double n0 = l2_norm(Expr(s.u_prev));
    CnStepper st(p);
    for (int n = 1; n <= steps; ++n) s = CnStepper::next_state(st.step(s, 0.004, ops));
    drift = std::max(drift, std::abs(l2_norm(Expr(s.u_prev)) - n0) / n0);
  }
  g.check(drift <= 1e-10 * steps, "a. relative norm drift %.2e after %d steps, r = 1..4 (tol 1e-10 n)", drift, steps);

  // b. midpoint identity on uniform and adaptive runs
  double mid = 0.0;
  for (const char* name : {"exp1a", "exp1b", "exp2"}) {
    auto q = catalog(name);
    q.T = 0.05;
    UniformConfig c;
    c.degree = q.degree;
    c.elements = 64;
    c.steps = 10;
    c.check_midpoint = true;
    mid = std::max(mid, run_uniform(q, c).midpoint_residual);
  }
  AdaptiveConfig ac;
  ac.tol_S = 0.3;
  ac.tol_T = 0.02;
  ac.k0 = 0.01;
  ac.degree = 2;
  ac.check_midpoint = true;
  AdaptiveDriver d(p, ac);
  d.run();
  mid = std::max(mid, d.midpoint_residual());
  int changes = 0;
  for (const auto& r : d.records()) changes += r.space_iters > 0;
  g.check(mid <= 1e-10, "b. midpoint residual %.2e over uniform runs and %zu adaptive steps (%d remeshed) (tol 1e-10)",
          mid, d.records().size(), changes);

  // c. Galerkin identity and projection idempotence
  double gal = 0.0, idem = 0.0;
  for (int r = 1; r <= 5; ++r) {
    auto mesh = Mesh1D::uniform(-1, 1, 9);
    mesh = refine(*mesh, {mesh->element(4), mesh->element(0)});
    auto ops = make_operators(SplineSpace::make(mesh, r));
    auto u = l2_project_field(*ops, p.u0);
    auto lap = discrete_laplacian(u, *ops);
    auto mv = ops->mass.multiply(lap.coeffs());
    auto sv = ops->stiffness.multiply(u.coeffs());
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < mv.size(); ++i) {
      err = std::max(err, std::abs(mv[i] + sv[i]));
      scale = std::max(scale, std::abs(sv[i]));
    }
    gal = std::max(gal, err / scale);
    idem = std::max(idem, oracle::max_rel(u.coeffs(), l2_project(*ops, Expr(u)).coeffs()));
  }
  g.check(gal <= 1e-11, "c. Galerkin identity %.2e (tol 1e-11)", gal);
  g.check(idem <= 1e-12, "c. projection idempotence %.2e (tol 1e-12)", idem);

  // d. homogeneity, constant potential, pure refinement
  double hom = 0.0;
  {
    auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(-1, 1, 13), 3));
    auto u = l2_project_field(*ops, p.u0);
    const double e = eta_space(u, *ops);
    for (Complex c : {Complex(3, 0), Complex(0, -0.5), Complex(2, 7)}) {
      hom = std::max(hom, std::abs(eta_space(c * u, *ops) - std::abs(c) * e) / (std::abs(c) * e));
    }
  }
  g.check(hom <= 1e-12, "d. eta homogeneity %.2e (tol 1e-12)", hom);
  ProblemSpec cst = p;
  cst.g = [](double, double) { return 5.0; };
  cst.g_time_dependent = false;
  cst.g_constant = 5.0;
  double s2 = 0.0, zc = 0.0;
  {
    auto mesh = Mesh1D::uniform(-1, 1, 8);
    StepState s = initial_state(cst, make_operators(SplineSpace::make(mesh, 2)));
    CnStepper st(cst);
    for (int n = 0; n < 4; ++n) {
      mesh = refine(*mesh, {mesh->element(static_cast<std::size_t>(n))});
      auto r = st.step(s, 0.01, make_operators(SplineSpace::make(mesh, 2)));
      auto e = step_estimators(s, r, cst);
      s2 = std::max(s2, e.zeta_S2);
      zc = std::max(zc, e.zeta_C);
      s = CnStepper::next_state(r);
    }
  }
  g.check(s2 == 0.0, "d. zeta_S2 = %.1e for a constant potential", s2);
  g.check(zc == 0.0, "d. zeta_C = %.1e on pure refinement steps", zc);

  // e. dense oracle, 5 degrees of freedom
  {
    const auto q = oracle::poly_problem();
    auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(0, 1, 5), 2));
    StepState s0 = initial_state(q, ops);
    auto r = CnStepper(q).step(s0, 0.1, ops);
    auto e = step_estimators(s0, r, q);
    oracle::Fem fem(*ops->space);
    const auto o = oracle::cn_step(fem, 0.0, 0.1);
    double dev = oracle::max_rel(o.u_new, r.u_new.coeffs());
    for (auto [a, b] : {std::pair{e.zeta_T0, o.zeta_T0}, {e.zeta_T1, o.zeta_T1}, {e.zeta_S0, o.zeta_S0},
                        {e.zeta_S1, o.zeta_S1}, {e.zeta_S2, o.zeta_S2}, {e.zeta_S3, o.zeta_S3}, {e.zeta_D, o.zeta_D}}) {
      dev = std::max(dev, oracle::rel(a, b));
    }
    g.check(ops->space->dim() == 5 && dev <= 1e-11, "e. dense oracle step and all zeta, dim %d: %.2e (tol 1e-11)",
            ops->space->dim(), dev);
  }
  return g;
}

// Case 1 at eps = 1e-3
Gate criterion6() {
  Gate g;
  CatalogOptions o;
  o.eps = 1e-3;
  const auto p = catalog("case1", o);
  AdaptiveExperimentConfig cfg;
  cfg.adaptive.tol_S = 2e-3;
  cfg.adaptive.tol_T = 1e-3;
  cfg.adaptive.degree = p.degree;
  cfg.adaptive.refine_fraction = p.refine_fraction;
  cfg.adaptive.initial_elements = 16;
  g.note("eps = 1e-3, r = " + std::to_string(p.degree) + ", tol_S = 2e-3, tol_T = 1e-3, T = 0.1");
  std::vector<double> settled;
  for (double k0 : {1e-2, 1e-3, 1e-4}) {
    cfg.adaptive.k0 = k0;
    cfg.compare_uniform = k0 == 1e-3;
    auto rep = run_adaptive_experiment(p, cfg);
    bool tol_ok = true;
    for (const auto& r : rep.records) {
      tol_ok = tol_ok && r.zeta_T <= cfg.adaptive.theta1 * cfg.adaptive.tol_T * (1 + 1e-12) &&
               r.zeta_S <= cfg.adaptive.tol_S * (1 + 1e-12);
    }
    g.check(tol_ok, "k0 = %g: %zu accepted steps within tolerances, settled k = %.4e, Total DoF %ld", k0,
            rep.records.size(), rep.settled_k, rep.total_dof);
    settled.push_back(rep.settled_k);
    if (rep.uniform) {
      const double a = rep.totals.total(), u = rep.uniform->totals.total();
      g.check(u >= 10 * a, "total estimator adaptive %.4e vs uniform %.4e (M = %d, k = %.3e): ratio %.1f (need >= 10)",
              a, u, rep.uniform->elements, rep.uniform->k, u / a);
    }
  }
  const double spread = *std::max_element(settled.begin(), settled.end()) / *std::min_element(settled.begin(), settled.end());
  const double factor = std::max(1 / cfg.adaptive.delta1, cfg.adaptive.delta2);
  g.check(spread <= factor, "settled k spread %.4f across k0 (tol one factor %.4f)", spread, factor);
  return g;
}

// obs1: V = 10, eps = 1e-3, r = 2, observable mode, space adaptivity at fixed k
Gate criterion7() {
  Gate g;
  const auto p = catalog("obs1");
  AdaptiveExperimentConfig cfg;
  cfg.adaptive.tol_S = 2e-2;
  cfg.adaptive.tol_T = 1.0;
  cfg.adaptive.k0 = 1e-4;
  cfg.adaptive.adapt_time = false;
  cfg.adaptive.observable_mode = true;
  cfg.adaptive.degree = p.degree;
  cfg.adaptive.refine_fraction = p.refine_fraction;
  cfg.compare_uniform = true;
  auto rep = run_adaptive_experiment(p, cfg);
  const int steps = static_cast<int>(std::lround(p.T / cfg.adaptive.k0));
  auto ref = observable_reference(p, 1 << 19, steps);
  auto a = observable_distances(rep.final_u, ref);
  auto u = observable_distances(rep.uniform->final_u, ref);
  g.note("k = 1e-4, tol_S = 2e-2, Total DoF " + std::to_string(rep.total_dof) + ", uniform M = " +
         std::to_string(rep.uniform->elements) + ", reference r = 1, M = 2^19");
  g.check(a.density < u.density, "density distance adaptive %.4e < uniform %.4e", a.density, u.density);
  g.note("current distance adaptive " + std::to_string(a.current) + ", uniform " + std::to_string(u.current));
  return g;
}

}  // namespace

int main() {
  struct Entry {
    const char* title;
    std::function<Gate()> run;
  };
  const std::vector<Entry> entries{
      {"1 Exp 1a estimators and EOC (r = 1, k = h)", criterion1},
      {"2 Exp 2 exact error, EOC, effectivity (r = 2)", criterion2},
      {"3 Exp 1b spot check (M = 120, 1/k = 160)", criterion3},
      {"4 eps-sensitivity, eps = 0.005 (r = 1, k = h)", criterion4},
      {"5 property suite", criterion5},
      {"6 adaptive Case 1 (eps = 1e-3)", criterion6},
      {"7 observable mode, density distance", criterion7},
  };
  int failed = 0;
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Gate g;
    try {
      g = e.run();
    } catch (const std::exception& ex) {
      g.ok = false;
      g.note(std::string("exception: ") + ex.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %s (%.1f s)\n", g.ok ? "PASS" : "FAIL", e.title, s);
    for (const auto& l : g.lines) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    failed += !g.ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
