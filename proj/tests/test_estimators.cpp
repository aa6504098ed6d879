#include <doctest.h>

#include <cmath>

#include "cn_oracle.hpp"
#include "cnfe/estimators.hpp"

using namespace cnfe;

namespace {

ComplexField bump = [](double x) { return std::exp(Complex(-20 * x * x, 6 * x)) * (1 - x * x); };

ProblemSpec constant_g_problem() {
  ProblemSpec p;
  p.name = "const";
  p.a = -1;
  p.b = 1;
  p.alpha = 0.5;
  p.g = [](double, double) { return 3.0; };
  p.g_constant = 3.0;
  p.u0 = bump;
  return p;
}

}  // namespace

TEST_CASE("eta of the hat function on two elements is sqrt(3)") {
  auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(0, 1, 2), 1));
  FeFunction hat(ops->space, {Complex(1.0)});
  CHECK(eta_space(hat, *ops) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
  auto per = eta_sq_per_element(hat, discrete_laplacian(hat, *ops));
  REQUIRE(per.size() == 2);
  CHECK(per[0] == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(per[1] == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("eta is absolutely homogeneous") {
  for (int r = 1; r <= 4; ++r) {
    auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(-1, 1, 11), r));
    auto u = l2_project_field(*ops, bump);
    const double e = eta_space(u, *ops);
    for (Complex c : {Complex(2.5, 0), Complex(0, -3), Complex(1, 1)}) {
      CHECK(std::abs(eta_space(c * u, *ops) - std::abs(c) * e) <= 1e-12 * std::abs(c) * e);
    }
  }
}

TEST_CASE("jump option adds the derivative jumps of linear splines only") {
  auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(0, 1, 2), 1));
  FeFunction hat(ops->space, {Complex(1.0)});
  EtaOptions j{true};
  // |[u']| = 4 at x = 1/2, h^3 |.|^2 = 2, split between the two neighbours
  CHECK(eta_space(hat, *ops, j) * eta_space(hat, *ops, j) == doctest::Approx(3.0 + 2.0));
  auto ops2 = make_operators(SplineSpace::make(Mesh1D::uniform(0, 1, 6), 2));
  auto u = l2_project_field(*ops2, bump);
  CHECK(eta_space(u, *ops2, j) == doctest::Approx(eta_space(u, *ops2)).epsilon(1e-13));
}

TEST_CASE("pair indicator: same mesh reduces to eta of the difference") {
  auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(-1, 1, 9), 3));
  auto u = l2_project_field(*ops, bump);
  auto v = l2_project_field(*ops, [](double x) { return Complex(1 - x * x, x * (1 - x * x)); });
  auto lu = discrete_laplacian(u, *ops);
  auto lv = discrete_laplacian(v, *ops);
  CHECK(eta_space_pair(u, lu, u, lu) < 1e-14 * eta_space(u, *ops));
  CHECK(eta_space_pair(u, lu, v, lv) == doctest::Approx(eta_space(u - v, *ops)).epsilon(1e-12));
}

TEST_CASE("pair indicator lives on the common coarsening") {
  auto base = Mesh1D::uniform(0, 1, 4);
  auto a = refine(*base, {base->element(0)});
  auto b = refine(*base, {base->element(3)});
  auto oa = make_operators(SplineSpace::make(a, 2));
  auto ob = make_operators(SplineSpace::make(b, 2));
  auto ua = l2_project_field(*oa, oracle::u0_of);
  auto ub = l2_project_field(*ob, oracle::u0_of);
  auto pair = eta_pair_sq_per_element(ua, discrete_laplacian(ua, *oa), ub, discrete_laplacian(ub, *ob));
  CHECK(pair.coarse->size() == 4);
  CHECK(pair.sq.size() == 4);
  // oracle on the coarse element [0, 1/4]: h = 1/4 with both residuals integrated there
  oracle::Fem fa(*oa->space), fb(*ob->space);
  const auto la = fa.lap(ua.coeffs());
  const auto lb = fb.lap(ub.coeffs());
  const auto rule = oracle::gauss(10);
  double s = 0.0;
  for (double x0 : {0.0, 0.125}) {
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double x = x0 + 0.125 * rule.x[q];
      const auto d = (fa.value(ua.coeffs(), x, 2) - fa.value(la, x, 0)) - (fb.value(ub.coeffs(), x, 2) - fb.value(lb, x, 0));
      s += 0.125 * rule.w[q] * std::pow(0.25, 4) * std::norm(d);
    }
  }
  CHECK(pair.sq[0] == doctest::Approx(s).epsilon(1e-11));
}

TEST_CASE("potential statistics") {
  ProblemSpec p;
  p.a = -2;
  p.b = 2;
  const double eps = 0.5;
  p.g = [eps](double x, double) { return x * x / (2 * eps); };
  auto space = SplineSpace::make(Mesh1D::uniform(-2, 2, 8), 2);
  auto s = potential_stats(p, 0.1, 0.0, 0.2, *space);
  CHECK(s.gbar == doctest::Approx(2.0));
  CHECK(s.p == doctest::Approx(2.0));

  p.g_constant = 7.0;
  s = potential_stats(p, 0.1, 0.0, 0.2, *space);
  CHECK(s.gbar == 7.0);
  CHECK(s.p == 0.0);

  // time dependence enters p through the sampled times
  ProblemSpec q;
  q.a = 0;
  q.b = 1;
  q.g = [](double, double t) { return 10 * t; };
  q.g_time_dependent = true;
  auto sq = potential_stats(q, 0.5, 0.4, 0.6, *SplineSpace::make(Mesh1D::uniform(0, 1, 3), 1));
  CHECK(sq.gbar == doctest::Approx(5.0));
  CHECK(sq.p == doctest::Approx(1.0));
}

TEST_CASE("constant potential gives zero second space estimator") {
  const auto p = constant_g_problem();
  auto ops = make_operators(SplineSpace::make(Mesh1D::uniform(-1, 1, 16), 2));
  StepState s = initial_state(p, ops);
  CnStepper st(p);
  for (int n = 0; n < 3; ++n) {
    auto r = st.step(s, 0.01, ops);
    auto e = step_estimators(s, r, p);
    CHECK(e.zeta_S2 == 0.0);
    CHECK(e.zeta_D < 1e-12 * (1 + e.zeta_S0));
    s = CnStepper::next_state(r);
  }
}

TEST_CASE("coarsening estimator vanishes on refinement and not on coarsening") {
  const auto p = constant_g_problem();
  auto coarse = Mesh1D::uniform(-1, 1, 8);
  auto fine = refine(*coarse, coarse->elements());
  auto oc = make_operators(SplineSpace::make(coarse, 2));
  auto of = make_operators(SplineSpace::make(fine, 2));
  CnStepper st(p);
  StepState s = initial_state(p, oc);
  auto r = st.step(s, 0.01, of);
  CHECK(step_estimators(s, r, p).zeta_C == 0.0);
  StepState s2 = initial_state(p, of);
  auto r2 = st.step(s2, 0.01, oc);
  CHECK_FALSE(r2.refines_prev);
  CHECK(step_estimators(s2, r2, p).zeta_C > 0.0);
}

TEST_CASE("totals: maxima for T0 and S0, sums elsewhere") {
  InitialEstimators init{0.1, 0.5};
  EstimatorTotals t(init);
  CHECK(t.S0() == 0.5);
  StepEstimators a, b;
  a.t = 0.1;
  a.k = 0.1;
  a.zeta_T0 = 1;
  a.zeta_T1 = 2;
  a.zeta_S0 = 0.2;
  a.zeta_S1 = 1;
  a.zeta_S2 = 1;
  a.zeta_S3 = 1;
  a.zeta_C = 1;
  a.zeta_D = 1;
  b = a;
  b.t = 0.2;
  b.zeta_T0 = 0.5;
  b.zeta_T1 = 3;
  b.zeta_S0 = 0.7;
  t.accumulate(a);
  t.accumulate(b);
  CHECK(t.T0() == 1);
  CHECK(t.T1() == 5);
  CHECK(t.S0() == 0.7);
  CHECK(t.S1() == 2);
  CHECK(t.total() == doctest::Approx(0.1 + 0.5 + 1 + 5 + 0.7 + 2 + 2 + 2 + 2 + 2));
  CHECK(t.tilde_T() == doctest::Approx(1 + 3));
  CHECK(t.tilde_S() == doctest::Approx(0.1 + 0.5 + 0.7 + 1 + 1 + 1 + 1 + 1));
  StepEstimators late = a;
  CHECK_THROWS_AS(t.accumulate(late), Error);
}

TEST_CASE("csv rows have as many fields as their headers") {
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  StepEstimators s;
  CHECK(count(step_csv_header()) == count(step_csv_row(1, s)));
  EstimatorTotals t;
  CHECK(count(summary_csv_header()) == count(summary_csv_row(t)));
}
