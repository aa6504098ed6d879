#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnfe/experiments.hpp"

namespace fs = std::filesystem;
using namespace cnfe;

namespace {

struct Common {
  std::string problem;
  int degree = 0;  // 0: catalog default
  double eps = 0.0;
  double lambda = 0.0;
  int quad = 0;
  std::string out = "out";
  double C = 1.0;
  double C_hat = 1.0;
  bool jumps = false;
  bool gauss_time = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-p,--problem", c.problem, "catalog problem")->required();
  app->add_option("-r,--degree", c.degree, "spline degree (default: problem's)");
  app->add_option("--eps", c.eps, "override eps");
  app->add_option("--lambda", c.lambda, "override the WKB lambda");
  app->add_option("-q,--quad", c.quad, "Gauss points per element");
  app->add_option("-o,--out", c.out, "output directory");
  app->add_option("--C", c.C, "constant C");
  app->add_option("--C-hat", c.C_hat, "constant C hat");
  app->add_flag("--jumps", c.jumps, "include the 1D derivative-jump term in eta");
  app->add_flag("--gauss-time", c.gauss_time, "3-point Gauss rule for the time integral of E^{T,1}");
}

ProblemSpec load_problem(const Common& c) {
  CatalogOptions o;
  if (c.eps > 0.0) o.eps = c.eps;
  if (c.lambda > 0.0) o.lambda = c.lambda;
  ProblemSpec p = catalog(c.problem, o);
  if (c.degree > 0) p.degree = c.degree;
  return p;
}

EstimatorOptions estimator_options(const Common& c) {
  EstimatorOptions e;
  e.C = c.C;
  e.C_hat = c.C_hat;
  e.eta.jumps = c.jumps;
  e.gauss_time = c.gauss_time;
  return e;
}

fs::path out_dir(const Common& c) {
  fs::path d(c.out);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

void write_json(const fs::path& p, const nlohmann::json& j) { write(p, j.dump(2) + "\n"); }

nlohmann::json plot(std::string title, std::string x, std::string y, bool logy, nlohmann::json series) {
  return {{"title", std::move(title)}, {"x", std::move(x)}, {"y", std::move(y)}, {"log_y", logy},
          {"series", std::move(series)}};
}

nlohmann::json series(std::string name, std::string file, std::string xcol, std::string ycol) {
  return {{"name", std::move(name)}, {"file", std::move(file)}, {"x", std::move(xcol)}, {"y", std::move(ycol)}};
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

void print_summary(const EstimatorTotals& t) {
  std::printf("E_S0 %.4e  E_S1 %.4e  E_S2 %.4e  E_S3 %.4e  E_T0 %.4e  E_T1 %.4e  E_C %.4e  E_D %.4e\n", t.S0(),
              t.S1(), t.S2(), t.S3(), t.T0(), t.T1(), t.C(), t.D());
  std::printf("total %.4e  tilde_T %.4e  tilde_S %.4e\n", t.total(), t.tilde_T(), t.tilde_S());
}

// ---- run

struct RunOpts {
  int elements = 0;
  int steps = 0;
  bool exact = false;
};

void cmd_run(const Common& c, const RunOpts& o) {
  ProblemSpec prob = load_problem(c);
  UniformConfig cfg;
  cfg.degree = prob.degree;
  cfg.elements = o.elements;
  cfg.steps = o.steps;
  cfg.quad_points = c.quad;
  cfg.est = estimator_options(c);
  ErrorProbe probe;
  if (o.exact) probe = exact_error_probe(prob);
  UniformResult r = run_uniform_auto(prob, cfg, probe);
  const auto dir = out_dir(c);
  std::string steps = step_csv_header() + "\n";
  for (std::size_t n = 0; n < r.log.size(); ++n) steps += step_csv_row(static_cast<int>(n + 1), r.log[n]) + "\n";
  write(dir / "steps.csv", steps);
  write(dir / "summary.csv", summary_csv_header() + ",error\n" + summary_csv_row(r.totals) + "," +
                                 std::to_string(r.error) + "\n");
  write_json(dir / "plot_estimators.json",
             plot("local estimators", "t", "zeta", true,
                  {series("zeta_S0", "steps.csv", "t", "zeta_S0"), series("zeta_S1", "steps.csv", "t", "zeta_S1"),
                   series("zeta_S3", "steps.csv", "t", "zeta_S3"), series("zeta_T0", "steps.csv", "t", "zeta_T0"),
                   series("zeta_T1", "steps.csv", "t", "zeta_T1")}));
  std::printf("%s  r=%d  M=%d  N=%d  k=%.4e  (%.2fs)\n", prob.name.c_str(), cfg.degree, r.elements, r.steps, r.k,
              r.seconds);
  print_summary(r.totals);
  if (r.error >= 0.0) std::printf("error %.4e  ei %.4f\n", r.error, r.totals.total() / r.error);
}

// ---- eoc

struct EocOpts {
  std::vector<int> elements;
  std::vector<int> steps;
  bool exact = false;
  int ref_steps = 0;
  int ref_elements = 0;
  int ref_degree = 5;
};

std::string eoc_cell(const std::vector<double>& e, std::size_t row) {
  if (row == 0) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", e[row - 1]);
  return buf;
}

void cmd_eoc(const Common& c, const EocOpts& o) {
  ProblemSpec prob = load_problem(c);
  if (o.elements.size() != o.steps.size() || o.elements.size() < 2) {
    throw Error("eoc: give matching --elements and --steps lists with at least two rows");
  }
  std::optional<ReferenceSolution> ref;
  ErrorProbe probe;
  if (o.exact) {
    probe = exact_error_probe(prob);
  } else if (o.ref_steps > 0) {
    int lcm = 1;
    for (int n : o.steps) lcm = std::lcm(lcm, n);
    if (o.ref_steps % lcm != 0) throw Error("eoc: reference steps must be a multiple of every row's N");
    ref = make_reference(prob, o.ref_steps, o.ref_elements, o.ref_degree, o.ref_steps / lcm);
    probe = reference_error_probe(*ref);
  }
  std::vector<UniformResult> rows;
  for (std::size_t i = 0; i < o.elements.size(); ++i) {
    UniformConfig cfg;
    cfg.degree = prob.degree;
    cfg.elements = o.elements[i];
    cfg.steps = o.steps[i];
    cfg.quad_points = c.quad;
    cfg.est = estimator_options(c);
    cfg.keep_steps = false;
    rows.push_back(run_uniform_auto(prob, cfg, probe));
    std::fprintf(stderr, "row %zu: M=%d N=%d (%.1fs)\n", i, cfg.elements, cfg.steps, rows.back().seconds);
  }
  std::vector<double> M, kinv;
  for (const auto& r : rows) {
    M.push_back(r.elements);
    kinv.push_back(1.0 / r.k);
  }
  auto col = [&](auto f) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(f(r));
    return v;
  };
  struct Column {
    std::string name;
    std::vector<double> values;
    const std::vector<double>* res;
  };
  std::vector<Column> cols = {
      {"E_S0", col([](const UniformResult& r) { return r.totals.S0(); }), &M},
      {"E_S1", col([](const UniformResult& r) { return r.totals.S1(); }), &M},
      {"E_S2", col([](const UniformResult& r) { return r.totals.S2(); }), &M},
      {"E_S3", col([](const UniformResult& r) { return r.totals.S3(); }), &M},
      {"E_T0", col([](const UniformResult& r) { return r.totals.T0(); }), &kinv},
      {"E_T1", col([](const UniformResult& r) { return r.totals.T1(); }), &kinv},
      {"E_D", col([](const UniformResult& r) { return r.totals.D(); }), &kinv},
      {"E_total", col([](const UniformResult& r) { return r.totals.total(); }), &kinv},
  };
  const bool have_error = rows.front().error >= 0.0;
  if (have_error) cols.push_back({"error", col([](const UniformResult& r) { return r.error; }), &kinv});
  std::string csv = "M,k_inv";
  for (const auto& cl : cols) csv += "," + cl.name + ",EOC_" + cl.name;
  if (have_error) csv += ",ei";
  csv += "\n";
  std::vector<std::vector<double>> eocs;
  for (const auto& cl : cols) {
    const bool positive = std::all_of(cl.values.begin(), cl.values.end(), [](double v) { return v > 0.0; });
    eocs.push_back(positive ? eoc(cl.values, *cl.res) : std::vector<double>(rows.size() - 1, std::nan("")));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.6g", rows[i].elements, kinv[i]);
    csv += buf;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.4e,", cols[j].values[i]);
      csv += buf + eoc_cell(eocs[j], i);
    }
    if (have_error) {
      std::snprintf(buf, sizeof buf, ",%.4f", rows[i].totals.total() / rows[i].error);
      csv += buf;
    }
    csv += "\n";
  }
  const auto dir = out_dir(c);
  write(dir / "eoc.csv", csv);
  nlohmann::json s = nlohmann::json::array();
  for (const auto& cl : cols) s.push_back(series(cl.name, "eoc.csv", "M", cl.name));
  write_json(dir / "plot_eoc.json", plot("estimators vs M", "M", "estimator", true, s));
  std::cout << csv;
}

// ---- adapt / observables

struct AdaptOpts {
  AdaptiveConfig cfg;
  bool compare_uniform = false;
  std::vector<double> snapshots;
  int ref_elements = 1 << 19;
  int grid_points = 2001;
};

void add_adaptive(CLI::App* app, AdaptOpts& a) {
  auto& c = a.cfg;
  app->add_option("--tol-s", c.tol_S, "space tolerance");
  app->add_option("--tol-t", c.tol_T, "time tolerance");
  app->add_option("--k0", c.k0, "initial time step");
  app->add_option("--delta1", c.delta1);
  app->add_option("--delta2", c.delta2);
  app->add_option("--theta1", c.theta1);
  app->add_option("--theta2", c.theta2);
  app->add_option("--refine", c.refine_fraction, "refinement fraction (default: problem's)");
  app->add_option("--coarsen", c.coarsen_fraction, "coarsening fraction");
  app->add_option("--space-trigger", c.space_trigger, "fraction of tol_S that starts mesh adaptation");
  app->add_option("--initial-elements", c.initial_elements);
  app->add_option("--max-inner", c.max_inner_iters);
  app->add_option("--snapshots", a.snapshots, "times for solution snapshots")->delimiter(',');
}

void finish_adaptive_config(AdaptOpts& a, const ProblemSpec& prob, const Common& c, bool refine_given) {
  a.cfg.degree = prob.degree;
  a.cfg.quad_points = c.quad;
  a.cfg.est = estimator_options(c);
  if (!refine_given) a.cfg.refine_fraction = prob.refine_fraction;
}

AdaptiveReport write_adaptive(const fs::path& dir, const ProblemSpec& prob, const AdaptiveExperimentConfig& ecfg) {
  AdaptiveReport rep = run_adaptive_experiment(prob, ecfg);
  std::string steps = adaptive_csv_header() + "\n";
  for (const auto& r : rep.records) steps += adaptive_csv_row(r) + "\n";
  write(dir / "steps.csv", steps);
  write(dir / "summary.csv", summary_csv_header() + ",total_dof,settled_k\n" + summary_csv_row(rep.totals) + "," +
                                 std::to_string(rep.total_dof) + "," + std::to_string(rep.settled_k) + "\n");
  write(dir / "events.log", events_log(rep.events));
  std::string traj = trajectory_csv_header() + "\n";
  for (const auto& p : rep.trajectory) traj += trajectory_csv_row(p) + "\n";
  write(dir / "trajectory.csv", traj);
  if (!rep.snapshots.empty()) write_json(dir / "snapshots.json", rep.snapshots);
  nlohmann::json est = {series("tilde_T", "trajectory.csv", "t", "tilde_T"),
                        series("tilde_S", "trajectory.csv", "t", "tilde_S"),
                        series("total", "trajectory.csv", "t", "total")};
  write_json(dir / "plot_adaptive_estimators.json", plot("adaptive estimators", "t", "estimator", true, est));
  write_json(dir / "plot_steps.json", plot("time steps and dofs", "t", "k / dim", true,
                                           {series("k_n", "trajectory.csv", "t", "k"),
                                            series("dim", "trajectory.csv", "t", "dim")}));
  if (rep.uniform) {
    std::string u = trajectory_csv_header() + "\n";
    for (const auto& p : rep.uniform->trajectory) u += trajectory_csv_row(p) + "\n";
    write(dir / "uniform_trajectory.csv", u);
    write(dir / "uniform_summary.csv", summary_csv_header() + ",elements,steps\n" +
                                           summary_csv_row(rep.uniform->totals) + "," +
                                           std::to_string(rep.uniform->elements) + "," +
                                           std::to_string(rep.uniform->steps) + "\n");
    write_json(dir / "plot_uniform_estimators.json",
               plot("uniform estimators, same DoF", "t", "estimator", true,
                    {series("tilde_T", "uniform_trajectory.csv", "t", "tilde_T"),
                     series("tilde_S", "uniform_trajectory.csv", "t", "tilde_S"),
                     series("total", "uniform_trajectory.csv", "t", "total")}));
  }
  std::printf("%s  r=%d  steps=%zu  settled k=%.4e  total DoF=%ld  events=%zu  (%.1fs)\n", prob.name.c_str(),
              prob.degree, rep.records.size(), rep.settled_k, rep.total_dof, rep.events.size(), rep.seconds);
  print_summary(rep.totals);
  if (rep.uniform) {
    std::printf("uniform: M=%d N=%d\n", rep.uniform->elements, rep.uniform->steps);
    print_summary(rep.uniform->totals);
  }
  return rep;
}

void cmd_adapt(const Common& c, AdaptOpts a, bool refine_given, bool observable, bool no_time) {
  ProblemSpec prob = load_problem(c);
  finish_adaptive_config(a, prob, c, refine_given);
  a.cfg.observable_mode = observable;
  a.cfg.adapt_time = !no_time;
  AdaptiveExperimentConfig e{a.cfg, a.compare_uniform, a.snapshots};
  write_adaptive(out_dir(c), prob, e);
}

void cmd_observables(const Common& c, AdaptOpts a, bool refine_given) {
  ProblemSpec prob = load_problem(c);
  finish_adaptive_config(a, prob, c, refine_given);
  a.cfg.observable_mode = true;
  a.cfg.adapt_time = false;
  AdaptiveExperimentConfig e{a.cfg, true, a.snapshots};
  const auto dir = out_dir(c);
  AdaptiveReport rep = write_adaptive(dir, prob, e);
  const int steps = rep.uniform->steps;
  FeFunction ref = observable_reference(prob, a.ref_elements, steps);
  const auto da = observable_distances(rep.final_u, ref);
  const auto du = observable_distances(rep.uniform->final_u, ref);
  const std::string tag = time_tag(prob.T);
  std::vector<double> grid = observable_grid(rep.final_u.space().mesh(), a.grid_points);
  write(dir / ("observables_" + tag + ".csv"), observables_csv(rep.final_u, grid));
  std::vector<double> ugrid = observable_grid(rep.uniform->final_u.space().mesh(), a.grid_points);
  write(dir / ("observables_uniform_" + tag + ".csv"), observables_csv(rep.uniform->final_u, ugrid));
  std::vector<double> rgrid(static_cast<std::size_t>(a.grid_points));
  for (int i = 0; i < a.grid_points; ++i) rgrid[i] = prob.a + (prob.b - prob.a) * i / (a.grid_points - 1);
  write(dir / ("observables_reference_" + tag + ".csv"), observables_csv(ref, rgrid));
  std::string mesh = "x\n";
  for (double x : rep.final_u.space().mesh().breakpoints()) mesh += std::to_string(x) + "\n";
  write(dir / "final_mesh.csv", mesh);
  write(dir / "distances.csv", "run,density,current\nadaptive," + std::to_string(da.density) + "," +
                                   std::to_string(da.current) + "\nuniform," + std::to_string(du.density) + "," +
                                   std::to_string(du.current) + "\n");
  for (const char* q : {"N", "J"}) {
    write_json(dir / (std::string("plot_observable_") + q + ".json"),
               plot(std::string(q) + " at T", "x", q, false,
                    {series("adaptive", "observables_" + tag + ".csv", "x", q),
                     series("uniform, same DoF", "observables_uniform_" + tag + ".csv", "x", q),
                     series("reference", "observables_reference_" + tag + ".csv", "x", q),
                     series("grid points", "final_mesh.csv", "x", "")}));
  }
  std::printf("density L2 distance to reference: adaptive %.4e  uniform %.4e\n", da.density, du.density);
  std::printf("current L2 distance to reference: adaptive %.4e  uniform %.4e\n", da.current, du.current);
}

// ---- sensitivity

struct SensOpts {
  std::string mode = "kh";
  std::vector<double> hs;
  std::vector<double> ks;
  std::vector<int> elements;
  double k = 0.0;
  int M = 0;
};

void cmd_sensitivity(const Common& c, const SensOpts& o) {
  ProblemSpec prob = load_problem(c);
  std::vector<SensitivityPoint> pts;
  if (o.mode == "kh") {
    pts = k_equals_h(prob, o.hs);
  } else if (o.mode == "fixed-k") {
    pts = fixed_k_sweep(prob, o.k, o.elements);
  } else if (o.mode == "fixed-m") {
    pts = fixed_m_sweep(prob, o.M, o.ks);
  } else {
    throw Error("sensitivity: mode must be kh, fixed-k or fixed-m");
  }
  if (pts.empty()) throw Error("sensitivity: empty sweep");
  auto rows = run_sensitivity(prob.name, prob.degree, pts);
  std::string csv = sensitivity_csv_header() + "\n";
  for (const auto& r : rows) csv += sensitivity_csv_row(r) + "\n";
  const auto dir = out_dir(c);
  write(dir / "sensitivity.csv", csv);
  const std::string x = o.mode == "fixed-m" ? "k" : "h";
  write_json(dir / "plot_sensitivity.json",
             plot("estimators, eps sweep", x, "estimator", true,
                  {series("E_S0", "sensitivity.csv", x, "E_S0"), series("E_S1", "sensitivity.csv", x, "E_S1"),
                   series("E_S3", "sensitivity.csv", x, "E_S3"), series("E_T0", "sensitivity.csv", x, "E_T0"),
                   series("E_T1", "sensitivity.csv", x, "E_T1")}));
  std::cout << csv;
}

// ---- reference

struct RefOpts {
  int elements = 0;
  int steps = 0;
};

void cmd_reference(const Common& c, const RefOpts& o) {
  ProblemSpec prob = load_problem(c);
  UniformConfig cfg;
  cfg.degree = prob.degree;
  cfg.elements = o.elements;
  cfg.steps = o.steps;
  cfg.quad_points = c.quad;
  cfg.keep_steps = false;
  ErrorProbe probe;
  if (prob.has_exact()) probe = exact_error_probe(prob);
  UniformResult r = run_uniform_auto(prob, cfg, probe);
  const auto dir = out_dir(c);
  write_json(dir / "reference.json", solution_snapshot(prob.T, r.final_u));
  std::printf("%s reference: r=%d M=%d N=%d (%.1fs)\n", prob.name.c_str(), cfg.degree, o.elements, o.steps, r.seconds);
  if (r.error >= 0.0) std::printf("max error vs exact solution %.4e\n", r.error);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crank-Nicolson-Galerkin B-spline solver for linear Schrodinger equations"};
  app.set_config("--config", "", "TOML configuration file (options by subcommand section)");
  app.require_subcommand(1);
  argv = app.ensure_utf8(argv);

  Common rc, ec, ac, oc, sc, fc;
  RunOpts ro;
  auto* run = app.add_subcommand("run", "single uniform run");
  add_common(run, rc);
  run->add_option("-M,--elements", ro.elements)->required();
  run->add_option("-N,--steps", ro.steps)->required();
  run->add_flag("--exact", ro.exact, "error against the closed-form solution");

  EocOpts eo;
  auto* eocc = app.add_subcommand("eoc", "uniform refinement table with orders of convergence");
  add_common(eocc, ec);
  eocc->add_option("--elements", eo.elements)->delimiter(',')->required();
  eocc->add_option("--steps", eo.steps)->delimiter(',')->required();
  eocc->add_flag("--exact", eo.exact);
  eocc->add_option("--ref-steps", eo.ref_steps);
  eocc->add_option("--ref-elements", eo.ref_elements);
  eocc->add_option("--ref-degree", eo.ref_degree);

  AdaptOpts ao;
  bool observable = false, no_time = false;
  auto* adapt = app.add_subcommand("adapt", "time-space adaptive run");
  add_common(adapt, ac);
  add_adaptive(adapt, ao);
  adapt->add_flag("--observable", observable, "eps-scaled estimators");
  adapt->add_flag("--space-only", no_time, "keep k fixed at k0");
  adapt->add_flag("--compare-uniform", ao.compare_uniform, "uniform run with the same Total DoF");

  AdaptOpts oo;
  auto* obs = app.add_subcommand("observables", "observable-mode adaptive run vs uniform and reference");
  add_common(obs, oc);
  add_adaptive(obs, oo);
  obs->add_option("--ref-elements", oo.ref_elements, "degree-1 reference cells");
  obs->add_option("--grid", oo.grid_points, "output grid points");

  SensOpts so;
  auto* sens = app.add_subcommand("sensitivity", "eps-sensitivity sweeps");
  add_common(sens, sc);
  sens->add_option("--mode", so.mode, "kh | fixed-k | fixed-m");
  sens->add_option("--hs", so.hs, "k = h values")->delimiter(',');
  sens->add_option("--k", so.k, "fixed k");
  sens->add_option("--elements", so.elements, "M values for fixed-k")->delimiter(',');
  sens->add_option("-M", so.M, "fixed M");
  sens->add_option("--ks", so.ks, "k values for fixed-m")->delimiter(',');

  RefOpts fo;
  auto* refc = app.add_subcommand("reference", "fine uniform run saved as a snapshot");
  add_common(refc, fc);
  refc->add_option("-M,--elements", fo.elements)->required();
  refc->add_option("-N,--steps", fo.steps)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) cmd_run(rc, ro);
    if (*eocc) cmd_eoc(ec, eo);
    if (*adapt) cmd_adapt(ac, ao, adapt->count("--refine") > 0, observable, no_time);
    if (*obs) cmd_observables(oc, oo, obs->count("--refine") > 0);
    if (*sens) cmd_sensitivity(sc, so);
    if (*refc) cmd_reference(fc, fo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
