#pragma once

#include "ampaodv/census.hpp"
#include "ampaodv/core.hpp"
#include "ampaodv/engine.hpp"
#include "ampaodv/fixture.hpp"
#include "ampaodv/messages.hpp"
#include "ampaodv/metrics.hpp"
#include "ampaodv/mobility.hpp"
#include "ampaodv/prediction.hpp"
#include "ampaodv/random.hpp"
#include "ampaodv/router.hpp"
#include "ampaodv/scenario.hpp"
#include "ampaodv/selection.hpp"
#include "ampaodv/sweep.hpp"
#include "ampaodv/tables.hpp"
