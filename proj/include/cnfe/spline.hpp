#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "cnfe/mesh.hpp"

namespace cnfe {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Gauss-Legendre rule on the reference interval [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Exact for polynomials of degree <= 2q-1.
  explicit GaussRule(int q);
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Values of the m-th derivative of the r+1 B-splines that are nonzero on one
/// element. `first_active` is the active (Dirichlet-constrained) index of
/// values[0]; it is -1 on the first element.
struct BasisValues {
  int first_active = 0;
  std::vector<double> values;
};

class SplineSpace;
using SpacePtr = std::shared_ptr<const SplineSpace>;

/// Maximal-smoothness B-splines of degree r on a Mesh1D with the two boundary
/// functions removed (homogeneous Dirichlet conditions). Basis values and the
/// first two derivatives are tabulated at the Gauss points of every element.
class SplineSpace {
 public:
  SplineSpace(MeshPtr mesh, int degree, int quad_points = 0);

  static SpacePtr make(MeshPtr mesh, int degree, int quad_points = 0) {
    return std::make_shared<const SplineSpace>(std::move(mesh), degree, quad_points);
  }

  const Mesh1D& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  /// Number of active basis functions: elements + r - 2.
  int dim() const { return dim_; }
  int elements() const { return static_cast<int>(mesh_->size()); }
  const std::vector<double>& knots() const { return knots_; }
  const GaussRule& rule() const { return rule_; }
  int quad_points() const { return rule_.size(); }

  /// Derivatives 0..nders of the r+1 nonzero unconstrained B-splines at x in
  /// element e, written as out[m * (r+1) + j].
  void element_basis(std::size_t e, double x, int nders, std::span<double> out) const;

  /// Tabulated data on element e at Gauss point p.
  double qp_x(std::size_t e, int p) const { return qx_[e * rule_.size() + p]; }
  double qp_weight(std::size_t e, int p) const { return qw_[e * rule_.size() + p]; }
  /// m-th derivative (m <= 2) of local basis j at Gauss point p of element e.
  double qp_basis(std::size_t e, int p, int m, int j) const {
    return table_[((e * rule_.size() + p) * 3 + m) * (degree_ + 1) + j];
  }

  bool operator==(const SplineSpace& o) const {
    return degree_ == o.degree_ && quad_points() == o.quad_points() && same_mesh(mesh_, o.mesh_);
  }

 private:
  MeshPtr mesh_;
  int degree_;
  int dim_;
  std::vector<double> knots_;
  GaussRule rule_;
  std::vector<double> qx_;
  std::vector<double> qw_;
  std::vector<double> table_;
};

inline bool same_space(const SpacePtr& a, const SpacePtr& b) { return a == b || *a == *b; }

/// Basis evaluation at an arbitrary point. With `constrained`, entries of the
/// two removed boundary functions are zeroed.
BasisValues eval_basis(const SplineSpace& space, double x, int m, bool constrained = true);

/// Complex coefficient vector bound to a spline space.
class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(SpacePtr space);
  FeFunction(SpacePtr space, ComplexVector coeffs);

  const SplineSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const ComplexVector& coeffs() const { return coeffs_; }
  ComplexVector& coeffs() { return coeffs_; }
  int dim() const { return static_cast<int>(coeffs_.size()); }

  /// m-th derivative at x.
  Complex eval(double x, int m = 0) const;
  /// Same, with the containing element already known.
  Complex eval_in(std::size_t e, double x, int m) const;
  /// m-th derivative at Gauss point p of element e (m <= 2).
  Complex eval_qp(std::size_t e, int p, int m) const;

  FeFunction& operator+=(const FeFunction& o);
  FeFunction& operator-=(const FeFunction& o);
  FeFunction& operator*=(Complex s);

 private:
  SpacePtr space_;
  ComplexVector coeffs_;
};

FeFunction operator+(FeFunction a, const FeFunction& b);
FeFunction operator-(FeFunction a, const FeFunction& b);
FeFunction operator*(Complex s, FeFunction a);

/// Coefficient snapshot: degree plus [re, im] pairs (mesh serialized separately).
nlohmann::json coeffs_to_json(const FeFunction& u);

}  // namespace cnfe
