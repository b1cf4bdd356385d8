#ifndef MAGSTRICT_MAGSTRICT_HPP
#define MAGSTRICT_MAGSTRICT_HPP

#include "magstrict/benchmark.hpp"
#include "magstrict/config.hpp"
#include "magstrict/contributions.hpp"
#include "magstrict/diagnostics.hpp"
#include "magstrict/errors.hpp"
#include "magstrict/fem.hpp"
#include "magstrict/fields.hpp"
#include "magstrict/material.hpp"
#include "magstrict/mesh.hpp"
#include "magstrict/midpoint_integrator.hpp"
#include "magstrict/solvers.hpp"
#include "magstrict/sparse.hpp"
#include "magstrict/tangent_integrator.hpp"
#include "magstrict/vec.hpp"

#endif
