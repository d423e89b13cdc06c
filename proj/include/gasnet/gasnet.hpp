#pragma once

#include "gasnet/assembly.hpp"
#include "gasnet/config.hpp"
#include "gasnet/convergence.hpp"
#include "gasnet/errors.hpp"
#include "gasnet/format.hpp"
#include "gasnet/functionals.hpp"
#include "gasnet/io.hpp"
#include "gasnet/mesh_fem.hpp"
#include "gasnet/network.hpp"
#include "gasnet/physics.hpp"
#include "gasnet/quadrature.hpp"
#include "gasnet/rescale.hpp"
#include "gasnet/simulate.hpp"
#include "gasnet/solver.hpp"
#include "gasnet/state.hpp"
