#pragma once

// Maximum-entropy inference for quantum states: given Hermitian observables
// with target expectation values, recover the entropy-maximizing density
// matrix through its convex Lagrange dual. Ships the Bell-CHSH closed forms
// (mean plus dispersion constraints), separability classification, and the
// self-check battery comparing the two routes.

#include "qmaxent/bell_chsh.hpp"
#include "qmaxent/complex_matrix.hpp"
#include "qmaxent/errors.hpp"
#include "qmaxent/hermitian_eigen.hpp"
#include "qmaxent/problem_io.hpp"
#include "qmaxent/quantum_state.hpp"
#include "qmaxent/separability.hpp"
#include "qmaxent/solver.hpp"
#include "qmaxent/verification.hpp"
