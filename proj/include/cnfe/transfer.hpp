#pragma once

#include "cnfe/assembly.hpp"

namespace cnfe {

/// L2 projection of v(., t) onto the operators' space.
FeFunction l2_project_field(const SpaceOperators& ops, const SpaceTimeComplex& v, double t);
FeFunction l2_project_field(const SpaceOperators& ops, const ComplexField& v);
/// L2 projection of an expression whose meshes may differ from the target.
FeFunction l2_project(const SpaceOperators& ops, const Expr& expr);
/// L2 projection of an FE function onto another space (identity if the spaces coincide).
FeFunction project_between(const FeFunction& src, const SpaceOperators& dst);
/// Discrete Laplacian: M d = -S c on the function's own space.
FeFunction discrete_laplacian(const FeFunction& u, const SpaceOperators& ops);

}  // namespace cnfe
