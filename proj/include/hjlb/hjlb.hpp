#pragma once

// Umbrella header.

#include "hjlb/bounds.hpp"
#include "hjlb/characteristics.hpp"
#include "hjlb/config.hpp"
#include "hjlb/convolution.hpp"
#include "hjlb/grid.hpp"
#include "hjlb/hamiltonian.hpp"
#include "hjlb/harness.hpp"
#include "hjlb/herglotz.hpp"
#include "hjlb/initial_data.hpp"
#include "hjlb/numeric.hpp"
#include "hjlb/report.hpp"
#include "hjlb/solver.hpp"
