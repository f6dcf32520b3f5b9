#pragma once

#include "dkp/errors.hpp"
#include "dkp/flow.hpp"
#include "dkp/kappa.hpp"
#include "dkp/kernel.hpp"
#include "dkp/polynomial_roots.hpp"
#include "dkp/spectral_curve.hpp"
#include "dkp/state_io.hpp"
#include "dkp/torus_lattice.hpp"
