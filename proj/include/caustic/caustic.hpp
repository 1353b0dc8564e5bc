#pragma once

// Umbrella header.

#include "caustic/config.hpp"
#include "caustic/edge_invariants.hpp"
#include "caustic/error.hpp"
#include "caustic/expr.hpp"
#include "caustic/focal.hpp"
#include "caustic/geometry.hpp"
#include "caustic/germ_order.hpp"
#include "caustic/jet.hpp"
#include "caustic/mesh.hpp"
#include "caustic/parallel.hpp"
#include "caustic/report.hpp"
#include "caustic/vec.hpp"
