#ifndef MODESCENT_MODESCENT_HPP
#define MODESCENT_MODESCENT_HPP

// Umbrella header.

#include "modescent/errors.hpp"
#include "modescent/problem.hpp"
#include "modescent/polynomial.hpp"
#include "modescent/registry.hpp"
#include "modescent/min_norm.hpp"
#include "modescent/direction.hpp"
#include "modescent/geometry.hpp"
#include "modescent/linesearch.hpp"
#include "modescent/solver.hpp"
#include "modescent/globalize.hpp"
#include "modescent/io.hpp"

#endif  // MODESCENT_MODESCENT_HPP
