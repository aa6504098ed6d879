#pragma once

#include "cnfe/harness.hpp"

namespace cnfe {

/// Degree 1 on a uniform mesh with g constant in space and time and f = 0:
/// mass and stiffness share the discrete sine basis, so every step of the
/// scheme is diagonal and all local estimators are the same for every n.
bool spectral_applicable(const ProblemSpec& prob, const UniformConfig& cfg);

/// Same output as run_uniform (without an error probe) computed in the sine
/// basis with FFTW's DST-I.
UniformResult run_uniform_spectral(const ProblemSpec& prob, const UniformConfig& cfg);

}  // namespace cnfe
