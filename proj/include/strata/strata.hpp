#pragma once

#include "strata/evaluators.hpp"
#include "strata/hardware.hpp"
#include "strata/hardware_loader.hpp"
#include "strata/mapping.hpp"
#include "strata/primitives.hpp"
#include "strata/rational.hpp"
#include "strata/simulator.hpp"
#include "strata/sweep.hpp"
#include "strata/task_graph.hpp"
#include "strata/workload_gen.hpp"
