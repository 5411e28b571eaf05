#pragma once

// Umbrella header: outage probability and throughput of full-duplex
// cellular networks with sectorized directional antennas, by stochastic-
// geometry evaluation and by Monte Carlo simulation.

#include "fdnet/antenna.hpp"
#include "fdnet/composite.hpp"
#include "fdnet/config.hpp"
#include "fdnet/csv.hpp"
#include "fdnet/experiment.hpp"
#include "fdnet/laplace.hpp"
#include "fdnet/montecarlo.hpp"
#include "fdnet/outage.hpp"
#include "fdnet/quadrature.hpp"
#include "fdnet/rng.hpp"
#include "fdnet/specfun.hpp"
#include "fdnet/threegpp.hpp"
#include "fdnet/validation.hpp"
