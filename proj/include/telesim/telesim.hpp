#pragma once

#include "telesim/units.hpp"
#include "telesim/random.hpp"
#include "telesim/excitation.hpp"
#include "telesim/control.hpp"
#include "telesim/config.hpp"
#include "telesim/timeseries.hpp"
#include "telesim/plant.hpp"
#include "telesim/lti.hpp"
#include "telesim/sysid.hpp"
#include "telesim/identification.hpp"
#include "telesim/report.hpp"
