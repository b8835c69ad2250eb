#pragma once

#include "flyby/error.hpp"
#include "flyby/physics.hpp"
#include "flyby/state.hpp"
#include "flyby/network.hpp"
#include "flyby/netlang.hpp"
#include "flyby/statistics.hpp"
#include "flyby/scenario.hpp"
