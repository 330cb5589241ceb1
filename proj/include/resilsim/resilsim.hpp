#pragma once

#include "resilsim/error.hpp"
#include "resilsim/taxonomy.hpp"
#include "resilsim/rng.hpp"
#include "resilsim/metrics.hpp"
#include "resilsim/system_model.hpp"
#include "resilsim/patterns.hpp"
#include "resilsim/trace.hpp"
#include "resilsim/engine.hpp"
#include "resilsim/scenarios.hpp"
