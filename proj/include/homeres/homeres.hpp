// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "homeres/csv.hpp"
#include "homeres/datetime.hpp"
#include "homeres/io.hpp"
#include "homeres/metrics.hpp"
#include "homeres/milp.hpp"
#include "homeres/mpc.hpp"
#include "homeres/plant.hpp"
#include "homeres/rules.hpp"
#include "homeres/scenario.hpp"
#include "homeres/trace.hpp"
#include "homeres/weather.hpp"
