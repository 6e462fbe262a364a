#pragma once

// Umbrella header for the numerical library (the app/ layer is separate).

#include "trinecap/adaptive.hpp"
#include "trinecap/c11.hpp"
#include "trinecap/ensembles.hpp"
#include "trinecap/info.hpp"
#include "trinecap/linalg.hpp"
#include "trinecap/lp.hpp"
#include "trinecap/optimize.hpp"
#include "trinecap/simplex.hpp"
#include "trinecap/tree.hpp"
