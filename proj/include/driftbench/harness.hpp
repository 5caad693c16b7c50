#pragma once

#include "driftbench/harness/analysis.hpp"
#include "driftbench/harness/config.hpp"
#include "driftbench/harness/results.hpp"
#include "driftbench/harness/runner.hpp"
