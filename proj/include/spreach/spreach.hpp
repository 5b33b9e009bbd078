#pragma once

// Umbrella header for the spreach library.

#include "spreach/assumptions.hpp"
#include "spreach/box_set.hpp"
#include "spreach/cli.hpp"
#include "spreach/config.hpp"
#include "spreach/contour.hpp"
#include "spreach/errors.hpp"
#include "spreach/feedback.hpp"
#include "spreach/field_io.hpp"
#include "spreach/grid.hpp"
#include "spreach/hj_solver.hpp"
#include "spreach/models.hpp"
#include "spreach/payoff.hpp"
#include "spreach/reach.hpp"
#include "spreach/rng.hpp"
#include "spreach/sim.hpp"
#include "spreach/svg.hpp"
#include "spreach/systems.hpp"
#include "spreach/value_field.hpp"
#include "spreach/version.hpp"
