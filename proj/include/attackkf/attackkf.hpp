#pragma once

// Umbrella header for the attack-aware Kalman filtering library.

#include "attackkf/attack.hpp"
#include "attackkf/config.hpp"
#include "attackkf/csv.hpp"
#include "attackkf/errors.hpp"
#include "attackkf/filter.hpp"
#include "attackkf/gslr.hpp"
#include "attackkf/lgssm.hpp"
#include "attackkf/linalg.hpp"
#include "attackkf/monte_carlo.hpp"
#include "attackkf/random.hpp"
#include "attackkf/scenario.hpp"
