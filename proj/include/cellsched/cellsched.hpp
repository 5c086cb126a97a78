#pragma once

// Umbrella header for the simulator library. report_io.hpp is left out;
// include it explicitly when JSON output is needed.

#include "cellsched/channel.hpp"
#include "cellsched/config.hpp"
#include "cellsched/error.hpp"
#include "cellsched/experiment.hpp"
#include "cellsched/metrics.hpp"
#include "cellsched/random.hpp"
#include "cellsched/simcore.hpp"
#include "cellsched/strategies.hpp"
#include "cellsched/workload.hpp"
