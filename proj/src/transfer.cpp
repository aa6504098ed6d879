#include "cnfe/transfer.hpp"

namespace cnfe {

namespace {

void check_space(const FeFunction& u, const SpaceOperators& ops) {
  if (!same_space(u.space_ptr(), ops.space)) throw Error("transfer: function does not live on the operators' space");
}

}  // namespace

FeFunction l2_project_field(const SpaceOperators& ops, const SpaceTimeComplex& v, double t) {
  auto c = load_vector(*ops.space, v, t);
  ops.mass_lu.solve_in_place(c);
  return {ops.space, std::move(c)};
}

FeFunction l2_project_field(const SpaceOperators& ops, const ComplexField& v) {
  return l2_project_field(ops, [&v](double x, double) { return v(x); }, 0.0);
}

FeFunction l2_project(const SpaceOperators& ops, const Expr& expr) {
  auto c = load_vector(*ops.space, expr);
  ops.mass_lu.solve_in_place(c);
  return {ops.space, std::move(c)};
}

FeFunction project_between(const FeFunction& src, const SpaceOperators& dst) {
  if (same_space(src.space_ptr(), dst.space)) return {dst.space, src.coeffs()};
  if (!(src.space().mesh().macro() == dst.space->mesh().macro())) throw Error("transfer: macro meshes differ");
  return l2_project(dst, Expr(src));
}

FeFunction discrete_laplacian(const FeFunction& u, const SpaceOperators& ops) {
  check_space(u, ops);
  auto c = ops.stiffness.multiply(u.coeffs());
  for (auto& z : c) z = -z;
  ops.mass_lu.solve_in_place(c);
  return {ops.space, std::move(c)};
}

}  // namespace cnfe
