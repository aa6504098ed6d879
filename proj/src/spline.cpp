#include "cnfe/spline.hpp"

#include <algorithm>
#include <array>

#include <gsl/gsl_integration.h>

namespace cnfe {

namespace {

constexpr int kMaxDegree = 10;

// Cox-de Boor recursion with derivatives (The NURBS Book, A2.3). `span` is the
// knot index with knots[span] <= x < knots[span+1].
void ders_basis(const std::vector<double>& U, int span, double x, int p, int n, std::span<double> out) {
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> ndu{};
  std::array<std::array<double, kMaxDegree + 1>, 2> a{};
  std::array<double, kMaxDegree + 1> left{}, right{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) out[j] = ndu[j][p];
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) out[k * (p + 1) + j] = 0.0;
  }
  const int nmax = std::min(n, p);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= nmax; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out[k * (p + 1) + r] = d;
      std::swap(s1, s2);
    }
  }
  double f = p;
  for (int k = 1; k <= nmax; ++k) {
    for (int j = 0; j <= p; ++j) out[k * (p + 1) + j] *= f;
    f *= (p - k);
  }
}

}  // namespace

GaussRule::GaussRule(int q) {
  if (q < 1) throw Error("quadrature: need at least one point");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(q));
  nodes.resize(static_cast<std::size_t>(q));
  weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &nodes[i], &weights[i], table);
  }
  gsl_integration_glfixed_table_free(table);
}

SplineSpace::SplineSpace(MeshPtr mesh, int degree, int quad_points)
    : mesh_(std::move(mesh)),
      degree_(degree),
      dim_(0),
      rule_(quad_points > 0 ? quad_points : degree + 3) {
  if (degree_ < 1 || degree_ > kMaxDegree) throw Error("spline: degree must be in [1, 10]");
  const int nel = static_cast<int>(mesh_->size());
  dim_ = nel + degree_ - 2;
  if (dim_ < 1) throw Error("spline: space has no interior degrees of freedom");
  const auto& bp = mesh_->breakpoints();
  knots_.reserve(bp.size() + 2 * degree_);
  knots_.insert(knots_.end(), degree_, bp.front());
  knots_.insert(knots_.end(), bp.begin(), bp.end());
  knots_.insert(knots_.end(), degree_, bp.back());

  const int q = rule_.size();
  const int nb = degree_ + 1;
  qx_.resize(static_cast<std::size_t>(nel) * q);
  qw_.resize(qx_.size());
  table_.resize(qx_.size() * 3 * nb);
  std::vector<double> buf(3 * nb);
  for (int e = 0; e < nel; ++e) {
    const double x0 = bp[e], h = bp[e + 1] - bp[e];
    for (int p = 0; p < q; ++p) {
      const std::size_t k = static_cast<std::size_t>(e) * q + p;
      qx_[k] = x0 + h * rule_.nodes[p];
      qw_[k] = h * rule_.weights[p];
      element_basis(static_cast<std::size_t>(e), qx_[k], 2, buf);
      std::copy(buf.begin(), buf.end(), table_.begin() + static_cast<std::ptrdiff_t>(k * 3 * nb));
    }
  }
}

void SplineSpace::element_basis(std::size_t e, double x, int nders, std::span<double> out) const {
  ders_basis(knots_, static_cast<int>(e) + degree_, x, degree_, nders, out);
}

BasisValues eval_basis(const SplineSpace& space, double x, int m, bool constrained) {
  const double tol = 1e-12 * (space.mesh().b() - space.mesh().a());
  if (x < space.mesh().a() - tol || x > space.mesh().b() + tol) throw Error("spline: point outside the domain");
  if (m < 0 || m > space.degree()) throw Error("spline: derivative order out of range");
  const std::size_t e = space.mesh().locate(x);
  const int nb = space.degree() + 1;
  std::vector<double> buf(static_cast<std::size_t>((m + 1) * nb));
  space.element_basis(e, x, m, buf);
  BasisValues out;
  out.first_active = static_cast<int>(e) - 1;
  out.values.assign(buf.begin() + m * nb, buf.begin() + (m + 1) * nb);
  if (constrained) {
    for (int j = 0; j < nb; ++j) {
      const int a = out.first_active + j;
      if (a < 0 || a >= space.dim()) out.values[j] = 0.0;
    }
  }
  return out;
}

FeFunction::FeFunction(SpacePtr space) : space_(std::move(space)), coeffs_(static_cast<std::size_t>(space_->dim())) {}

FeFunction::FeFunction(SpacePtr space, ComplexVector coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (static_cast<int>(coeffs_.size()) != space_->dim()) throw Error("spline: coefficient length mismatch");
}

Complex FeFunction::eval_in(std::size_t e, double x, int m) const {
  const int r = space_->degree();
  if (m > r) return 0.0;
  const int nb = r + 1;
  std::array<double, (kMaxDegree + 1) * (kMaxDegree + 1)> buf{};
  space_->element_basis(e, x, m, std::span<double>(buf.data(), static_cast<std::size_t>((m + 1) * nb)));
  Complex s = 0.0;
  const int first = static_cast<int>(e) - 1;
  for (int j = 0; j < nb; ++j) {
    const int a = first + j;
    if (a >= 0 && a < dim()) s += coeffs_[a] * buf[m * nb + j];
  }
  return s;
}

Complex FeFunction::eval(double x, int m) const {
  const double tol = 1e-12 * (space_->mesh().b() - space_->mesh().a());
  if (x < space_->mesh().a() - tol || x > space_->mesh().b() + tol) throw Error("spline: point outside the domain");
  if (m < 0) throw Error("spline: negative derivative order");
  return eval_in(space_->mesh().locate(x), x, m);
}

Complex FeFunction::eval_qp(std::size_t e, int p, int m) const {
  const int nb = space_->degree() + 1;
  const int first = static_cast<int>(e) - 1;
  Complex s = 0.0;
  for (int j = 0; j < nb; ++j) {
    const int a = first + j;
    if (a >= 0 && a < dim()) s += coeffs_[a] * space_->qp_basis(e, p, m, j);
  }
  return s;
}

FeFunction& FeFunction::operator+=(const FeFunction& o) {
  if (!same_space(space_, o.space_)) throw Error("spline: adding functions from different spaces");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

FeFunction& FeFunction::operator-=(const FeFunction& o) {
  if (!same_space(space_, o.space_)) throw Error("spline: subtracting functions from different spaces");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

FeFunction& FeFunction::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

FeFunction operator+(FeFunction a, const FeFunction& b) { return a += b; }
FeFunction operator-(FeFunction a, const FeFunction& b) { return a -= b; }
FeFunction operator*(Complex s, FeFunction a) { return a *= s; }

nlohmann::json coeffs_to_json(const FeFunction& u) {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& z : u.coeffs()) c.push_back({z.real(), z.imag()});
  return {{"degree", u.space().degree()}, {"coeffs", std::move(c)}};
}

}  // namespace cnfe
