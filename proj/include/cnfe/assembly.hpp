#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cnfe/spline.hpp"

namespace cnfe {

/// Square complex matrix with equal lower/upper half bandwidth, stored in the
/// LAPACK general-band layout with room for the LU fill-in.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int half_bandwidth);

  int dim() const { return n_; }
  int half_bandwidth() const { return p_; }

  Complex at(int i, int j) const;
  Complex& operator()(int i, int j);
  void add(int i, int j, Complex v) { (*this)(i, j) += v; }

  /// y = A x
  ComplexVector multiply(std::span<const Complex> x) const;
  double norm_inf() const;

  /// this = sum_k s_k * A_k (all operands of the same shape)
  static BandedMatrix combine(std::initializer_list<std::pair<Complex, const BandedMatrix*>> parts);

  // raw LAPACK storage
  int ldab() const { return 3 * p_ + 1; }
  const std::vector<Complex>& storage() const { return ab_; }

 private:
  int n_ = 0;
  int p_ = 0;
  std::vector<Complex> ab_;
};

/// Raised when a banded factorization meets an exactly zero pivot.
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(int pivot)
      : Error("banded LU: matrix is singular at pivot " + std::to_string(pivot)), pivot_(pivot) {}
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// LU factorization with partial pivoting confined to the band.
class BandLU {
 public:
  BandLU() = default;
  explicit BandLU(const BandedMatrix& a);

  ComplexVector solve(std::span<const Complex> rhs) const;
  void solve_in_place(std::span<Complex> rhs) const;
  int dim() const { return n_; }

 private:
  int n_ = 0;
  int p_ = 0;
  std::vector<Complex> ab_;
  std::vector<int> ipiv_;
};

/// Convenience one-shot solve.
ComplexVector banded_solve(const BandedMatrix& a, std::span<const Complex> rhs);

using RealField = std::function<double(double)>;
using ComplexField = std::function<Complex(double)>;
using SpaceTimeReal = std::function<double(double, double)>;
using SpaceTimeComplex = std::function<Complex(double, double)>;

/// Finite linear combination of FE functions (optionally differentiated and
/// multiplied by a real coefficient field) and closed-form complex fields.
/// Functions are held by pointer; an Expr must not outlive its operands.
class Expr {
 public:
  struct Term {
    Complex scale = 1.0;
    const FeFunction* function = nullptr;
    int derivative = 0;
    RealField weight;
    ComplexField field;
  };

  Expr() = default;
  Expr(const FeFunction& u) { add(u); }  // NOLINT: implicit on purpose

  Expr& add(const FeFunction& u, Complex scale = 1.0, int derivative = 0);
  Expr& add_weighted(const FeFunction& u, RealField weight, Complex scale = 1.0);
  Expr& add_field(ComplexField f, Complex scale = 1.0);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<Term> terms_;
};

/// Mass M_ij = <phi_j, phi_i> and stiffness S_ij = <phi_j', phi_i'>.
BandedMatrix mass_matrix(const SplineSpace& space);
BandedMatrix stiffness_matrix(const SplineSpace& space);
/// B_ij = <w(., t) phi_j, phi_i>
BandedMatrix weighted_mass_matrix(const SplineSpace& space, const SpaceTimeReal& w, double t);
/// Entries <v(., t), phi_i>
ComplexVector load_vector(const SplineSpace& space, const SpaceTimeComplex& v, double t);
/// Entries <expr, phi_i>, integrated on the common refinement of the space's
/// mesh and all meshes in the expression.
ComplexVector load_vector(const SplineSpace& space, const Expr& expr);

/// L2(a, b) norm of the expression on the common refinement of all its meshes.
double l2_norm(const Expr& expr, int quad_points = 0);
/// Squared L2 norm restricted to each element of `partition`, which must be
/// coarser than or equal to every mesh in the expression.
std::vector<double> l2_norm_sq_per_element(const Expr& expr, const Mesh1D& partition, int quad_points = 0);

/// L2 distance between two FE functions on unrelated meshes of the same
/// interval (breakpoint union, q Gauss points per piece).
double l2_distance(const FeFunction& u, const FeFunction& v, int quad_points = 0);
/// Real quantity built from a value and its first derivative.
using PointwiseObservable = std::function<double(Complex u, Complex du)>;
/// L2 distance between obs(u, u') and obs(v, v'), same quadrature as above.
double l2_distance(const FeFunction& u, const FeFunction& v, const PointwiseObservable& obs, int quad_points = 0);

/// Mass/stiffness data of one space, built once and shared.
struct SpaceOperators {
  SpacePtr space;
  BandedMatrix mass;
  BandedMatrix stiffness;
  BandLU mass_lu;
};
using OperatorsPtr = std::shared_ptr<const SpaceOperators>;

OperatorsPtr make_operators(SpacePtr space);

}  // namespace cnfe
