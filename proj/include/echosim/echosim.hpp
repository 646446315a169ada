// Umbrella header.

#pragma once

#include "echosim/config.hpp"
#include "echosim/experiments.hpp"
#include "echosim/io.hpp"
#include "echosim/model.hpp"
#include "echosim/observables.hpp"
#include "echosim/propagator.hpp"
#include "echosim/runner.hpp"
#include "echosim/version.hpp"
