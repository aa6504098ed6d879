#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "cnfe/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace cnfe {

// ---------------------------------------------------------------- band storage

BandedMatrix::BandedMatrix(int n, int half_bandwidth)
    : n_(n), p_(half_bandwidth), ab_(static_cast<std::size_t>(3 * half_bandwidth + 1) * n) {
  if (n < 1 || half_bandwidth < 0) throw Error("banded matrix: invalid shape");
}

Complex BandedMatrix::at(int i, int j) const {
  if (std::abs(i - j) > p_) return 0.0;
  return ab_[static_cast<std::size_t>(2 * p_ + i - j) + static_cast<std::size_t>(j) * ldab()];
}

Complex& BandedMatrix::operator()(int i, int j) {
  if (std::abs(i - j) > p_) throw Error("banded matrix: entry outside the band");
  return ab_[static_cast<std::size_t>(2 * p_ + i - j) + static_cast<std::size_t>(j) * ldab()];
}

ComplexVector BandedMatrix::multiply(std::span<const Complex> x) const {
  if (static_cast<int>(x.size()) != n_) throw Error("banded matrix: vector length mismatch");
  ComplexVector y(static_cast<std::size_t>(n_));
  const int ld = ldab();
  for (int j = 0; j < n_; ++j) {
    const Complex xj = x[j];
    const Complex* col = ab_.data() + static_cast<std::size_t>(j) * ld + 2 * p_;
    const int i0 = std::max(0, j - p_), i1 = std::min(n_ - 1, j + p_);
    for (int i = i0; i <= i1; ++i) y[i] += col[i - j] * xj;
  }
  return y;
}

double BandedMatrix::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = std::max(0, i - p_); j <= std::min(n_ - 1, i + p_); ++j) s += std::abs(at(i, j));
    best = std::max(best, s);
  }
  return best;
}

BandedMatrix BandedMatrix::combine(std::initializer_list<std::pair<Complex, const BandedMatrix*>> parts) {
  if (parts.size() == 0) throw Error("banded matrix: empty combination");
  const BandedMatrix& first = *parts.begin()->second;
  BandedMatrix out(first.n_, first.p_);
  for (const auto& [s, m] : parts) {
    if (m->n_ != first.n_ || m->p_ != first.p_) throw Error("banded matrix: shape mismatch in combination");
    for (std::size_t k = 0; k < out.ab_.size(); ++k) out.ab_[k] += s * m->ab_[k];
  }
  return out;
}

BandLU::BandLU(const BandedMatrix& a) : n_(a.dim()), p_(a.half_bandwidth()), ab_(a.storage()), ipiv_(a.dim()) {
  const lapack_int info = LAPACKE_zgbtrf_work(LAPACK_COL_MAJOR, n_, n_, p_, p_, ab_.data(), a.ldab(), ipiv_.data());
  if (info > 0) throw SingularMatrixError(info - 1);
  if (info < 0) throw Error("banded LU: invalid argument to zgbtrf");
}

void BandLU::solve_in_place(std::span<Complex> rhs) const {
  if (static_cast<int>(rhs.size()) != n_) throw Error("banded LU: right-hand side length mismatch");
  const lapack_int info = LAPACKE_zgbtrs_work(LAPACK_COL_MAJOR, 'N', n_, p_, p_, 1, ab_.data(), 3 * p_ + 1,
                                              ipiv_.data(), rhs.data(), n_);
  if (info != 0) throw Error("banded LU: zgbtrs failed");
}

ComplexVector BandLU::solve(std::span<const Complex> rhs) const {
  ComplexVector x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

ComplexVector banded_solve(const BandedMatrix& a, std::span<const Complex> rhs) { return BandLU(a).solve(rhs); }

// ---------------------------------------------------------------- expressions

Expr& Expr::add(const FeFunction& u, Complex scale, int derivative) {
  terms_.push_back({scale, &u, derivative, {}, {}});
  return *this;
}

Expr& Expr::add_weighted(const FeFunction& u, RealField weight, Complex scale) {
  terms_.push_back({scale, &u, 0, std::move(weight), {}});
  return *this;
}

Expr& Expr::add_field(ComplexField f, Complex scale) {
  terms_.push_back({scale, nullptr, 0, {}, std::move(f)});
  return *this;
}

namespace {

// Maps each element of `fine` to the element of `coarse` containing it.
std::vector<std::size_t> containing_elements(const Mesh1D& fine, const Mesh1D& coarse) {
  std::vector<std::size_t> map(fine.size());
  std::size_t j = 0;
  for (std::size_t e = 0; e < fine.size(); ++e) {
    while (j + 1 < coarse.size() && !coarse.element(j).is_ancestor_of(fine.element(e))) ++j;
    map[e] = j;
  }
  return map;
}

// Quadrature over the common refinement of a set of meshes, with the element
// of every participating mesh known at each sub-element.
class Sampler {
 public:
  Sampler(const Expr& expr, std::vector<const Mesh1D*> extra, int quad_points) : expr_(expr) {
    int q = quad_points;
    auto join = [this](const Mesh1D& m) {
      if (!ref_) {
        ref_ = &m;
      } else if (!(*ref_ == m)) {
        owned_ = common_refinement(*ref_, m);
        ref_ = owned_.get();
      }
    };
    for (const auto* m : extra) join(*m);
    for (const auto& t : expr.terms()) {
      if (t.function) {
        join(t.function->space().mesh());
        if (quad_points <= 0) q = std::max(q, t.function->space().quad_points());
      }
    }
    if (!ref_) throw Error("expression: no mesh to integrate on");
    if (q <= 0) q = 8;
    rule_ = std::make_unique<GaussRule>(q);
    for (const auto& t : expr.terms()) {
      if (!t.function) {
        maps_.emplace_back();
        fast_.push_back(false);
        continue;
      }
      const auto& fm = t.function->space().mesh();
      const bool same = fm == *ref_;
      fast_.push_back(same && t.function->space().quad_points() == q && t.derivative <= 2);
      maps_.push_back(same ? std::vector<std::size_t>{} : containing_elements(*ref_, fm));
    }
  }

  const Mesh1D& mesh() const { return *ref_; }
  const GaussRule& rule() const { return *rule_; }

  Complex value(std::size_t s, int p, double x) const {
    Complex v = 0.0;
    const auto& terms = expr_.terms();
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto& t = terms[k];
      Complex tv;
      if (t.function) {
        if (fast_[k]) {
          tv = t.function->eval_qp(s, p, t.derivative);
        } else {
          const std::size_t e = maps_[k].empty() ? s : maps_[k][s];
          tv = t.function->eval_in(e, x, t.derivative);
        }
        if (t.weight) tv *= t.weight(x);
      } else {
        tv = t.field(x);
      }
      v += t.scale * tv;
    }
    return v;
  }

 private:
  const Expr& expr_;
  const Mesh1D* ref_ = nullptr;
  MeshPtr owned_;
  std::unique_ptr<GaussRule> rule_;
  std::vector<std::vector<std::size_t>> maps_;
  std::vector<bool> fast_;
};

int space_bandwidth(const SplineSpace& s) { return s.degree(); }

}  // namespace

// ---------------------------------------------------------------- assembly

namespace {

template <typename WeightFn>
BandedMatrix assemble_pair(const SplineSpace& space, int mi, int mj, WeightFn&& w) {
  const int n = space.dim(), r = space.degree(), nb = r + 1;
  BandedMatrix out(n, space_bandwidth(space));
  std::vector<double> local(static_cast<std::size_t>(nb * nb));
  for (std::size_t e = 0; e < static_cast<std::size_t>(space.elements()); ++e) {
    std::fill(local.begin(), local.end(), 0.0);
    for (int p = 0; p < space.quad_points(); ++p) {
      const double wt = space.qp_weight(e, p) * w(space.qp_x(e, p));
      for (int a = 0; a < nb; ++a) {
        const double va = space.qp_basis(e, p, mi, a) * wt;
        for (int b = 0; b < nb; ++b) local[a * nb + b] += va * space.qp_basis(e, p, mj, b);
      }
    }
    const int first = static_cast<int>(e) - 1;
    for (int a = 0; a < nb; ++a) {
      const int i = first + a;
      if (i < 0 || i >= n) continue;
      for (int b = 0; b < nb; ++b) {
        const int j = first + b;
        if (j < 0 || j >= n) continue;
        out.add(i, j, local[a * nb + b]);
      }
    }
  }
  return out;
}

}  // namespace

BandedMatrix mass_matrix(const SplineSpace& space) {
  return assemble_pair(space, 0, 0, [](double) { return 1.0; });
}

BandedMatrix stiffness_matrix(const SplineSpace& space) {
  return assemble_pair(space, 1, 1, [](double) { return 1.0; });
}

BandedMatrix weighted_mass_matrix(const SplineSpace& space, const SpaceTimeReal& w, double t) {
  return assemble_pair(space, 0, 0, [&](double x) { return w(x, t); });
}

ComplexVector load_vector(const SplineSpace& space, const SpaceTimeComplex& v, double t) {
  const int n = space.dim(), nb = space.degree() + 1;
  ComplexVector out(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < static_cast<std::size_t>(space.elements()); ++e) {
    const int first = static_cast<int>(e) - 1;
    for (int p = 0; p < space.quad_points(); ++p) {
      const Complex val = v(space.qp_x(e, p), t) * space.qp_weight(e, p);
      for (int a = 0; a < nb; ++a) {
        const int i = first + a;
        if (i >= 0 && i < n) out[i] += val * space.qp_basis(e, p, 0, a);
      }
    }
  }
  return out;
}

ComplexVector load_vector(const SplineSpace& space, const Expr& expr) {
  const int n = space.dim(), nb = space.degree() + 1;
  ComplexVector out(static_cast<std::size_t>(n));
  if (expr.empty()) return out;
  Sampler sampler(expr, {&space.mesh()}, space.quad_points());
  const Mesh1D& ref = sampler.mesh();
  const bool same = ref == space.mesh();
  const auto map = same ? std::vector<std::size_t>{} : containing_elements(ref, space.mesh());
  const GaussRule& rule = sampler.rule();
  std::vector<double> buf(static_cast<std::size_t>(nb));
  for (std::size_t s = 0; s < ref.size(); ++s) {
    const double x0 = ref.left(s), h = ref.width(s);
    const std::size_t e = same ? s : map[s];
    const int first = static_cast<int>(e) - 1;
    for (int p = 0; p < rule.size(); ++p) {
      const double x = x0 + h * rule.nodes[p];
      const Complex val = sampler.value(s, p, x) * (h * rule.weights[p]);
      if (same) {
        for (int a = 0; a < nb; ++a) buf[a] = space.qp_basis(e, p, 0, a);
      } else {
        space.element_basis(e, x, 0, buf);
      }
      for (int a = 0; a < nb; ++a) {
        const int i = first + a;
        if (i >= 0 && i < n) out[i] += val * buf[a];
      }
    }
  }
  return out;
}

double l2_norm(const Expr& expr, int quad_points) {
  if (expr.empty()) return 0.0;
  Sampler sampler(expr, {}, quad_points);
  const Mesh1D& ref = sampler.mesh();
  const GaussRule& rule = sampler.rule();
  double sum = 0.0;
  for (std::size_t s = 0; s < ref.size(); ++s) {
    const double x0 = ref.left(s), h = ref.width(s);
    for (int p = 0; p < rule.size(); ++p) {
      sum += std::norm(sampler.value(s, p, x0 + h * rule.nodes[p])) * h * rule.weights[p];
    }
  }
  return std::sqrt(sum);
}

std::vector<double> l2_norm_sq_per_element(const Expr& expr, const Mesh1D& partition, int quad_points) {
  std::vector<double> out(partition.size(), 0.0);
  if (expr.empty()) return out;
  Sampler sampler(expr, {&partition}, quad_points);
  const Mesh1D& ref = sampler.mesh();
  const bool same = ref == partition;
  const auto map = same ? std::vector<std::size_t>{} : containing_elements(ref, partition);
  const GaussRule& rule = sampler.rule();
  for (std::size_t s = 0; s < ref.size(); ++s) {
    const double x0 = ref.left(s), h = ref.width(s);
    double local = 0.0;
    for (int p = 0; p < rule.size(); ++p) {
      local += std::norm(sampler.value(s, p, x0 + h * rule.nodes[p])) * h * rule.weights[p];
    }
    out[same ? s : map[s]] += local;
  }
  return out;
}

OperatorsPtr make_operators(SpacePtr space) {
  auto ops = std::make_shared<SpaceOperators>();
  ops->mass = mass_matrix(*space);
  ops->stiffness = stiffness_matrix(*space);
  ops->mass_lu = BandLU(ops->mass);
  ops->space = std::move(space);
  return ops;
}

namespace {

template <class F>
double union_l2(const FeFunction& u, const FeFunction& v, int quad_points, F&& diff) {
  const Mesh1D& mu = u.space().mesh();
  const Mesh1D& mv = v.space().mesh();
  if (std::abs(mu.a() - mv.a()) > 1e-14 || std::abs(mu.b() - mv.b()) > 1e-14) throw Error("l2_distance: domains differ");
  const int q = quad_points > 0 ? quad_points : std::max(u.space().quad_points(), v.space().quad_points());
  const GaussRule rule(q);
  const auto& bu = mu.breakpoints();
  const auto& bv = mv.breakpoints();
  std::vector<double> pts;
  pts.reserve(bu.size() + bv.size());
  std::merge(bu.begin(), bu.end(), bv.begin(), bv.end(), std::back_inserter(pts));
  double sum = 0.0;
  std::size_t eu = 0, ev = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double x0 = pts[i], h = pts[i + 1] - x0;
    if (h <= 1e-15 * (mu.b() - mu.a())) continue;
    const double xc = x0 + 0.5 * h;
    while (eu + 1 < mu.size() && mu.right(eu) <= xc) ++eu;
    while (ev + 1 < mv.size() && mv.right(ev) <= xc) ++ev;
    for (int p = 0; p < q; ++p) {
      const double x = x0 + h * rule.nodes[p];
      sum += diff(eu, ev, x) * h * rule.weights[p];
    }
  }
  return std::sqrt(sum);
}

}  // namespace

double l2_distance(const FeFunction& u, const FeFunction& v, int quad_points) {
  return union_l2(u, v, quad_points,
                  [&](std::size_t eu, std::size_t ev, double x) { return std::norm(u.eval_in(eu, x, 0) - v.eval_in(ev, x, 0)); });
}

double l2_distance(const FeFunction& u, const FeFunction& v, const PointwiseObservable& obs, int quad_points) {
  return union_l2(u, v, quad_points, [&](std::size_t eu, std::size_t ev, double x) {
    const double d = obs(u.eval_in(eu, x, 0), u.eval_in(eu, x, 1)) - obs(v.eval_in(ev, x, 0), v.eval_in(ev, x, 1));
    return d * d;
  });
}

}  // namespace cnfe
