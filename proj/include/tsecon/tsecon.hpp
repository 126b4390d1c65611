#pragma once

#include "tsecon/ar.hpp"
#include "tsecon/breaks.hpp"
#include "tsecon/cointegration.hpp"
#include "tsecon/critical_values.hpp"
#include "tsecon/dgp.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/lag_select.hpp"
#include "tsecon/monte_carlo.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/random.hpp"
#include "tsecon/series.hpp"
#include "tsecon/test_report.hpp"
#include "tsecon/unit_root.hpp"
#include "tsecon/var.hpp"
