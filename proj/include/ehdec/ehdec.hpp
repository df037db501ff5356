#pragma once

#include "ehdec/errors.hpp"
#include "ehdec/model.hpp"
#include "ehdec/reward.hpp"
#include "ehdec/scenario.hpp"
#include "ehdec/centralized.hpp"
#include "ehdec/occupancy.hpp"
#include "ehdec/solver.hpp"
#include "ehdec/rng.hpp"
#include "ehdec/simulate.hpp"
#include "ehdec/config_io.hpp"
#include "ehdec/experiment.hpp"
#include "ehdec/plot.hpp"
