#pragma once

// Umbrella header for the numerical library (the batch harness is separate).

#include "crackbem/asymptotics.hpp"
#include "crackbem/bem.hpp"
#include "crackbem/convergence.hpp"
#include "crackbem/crack.hpp"
#include "crackbem/errors.hpp"
#include "crackbem/finite_hilbert.hpp"
#include "crackbem/kernels.hpp"
#include "crackbem/linalg2.hpp"
#include "crackbem/material.hpp"
#include "crackbem/mesh.hpp"
#include "crackbem/quadrature.hpp"
#include "crackbem/study.hpp"
