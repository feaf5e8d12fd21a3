#pragma once

#include "svito/errors.hpp"
#include "svito/text.hpp"
#include "svito/convex_set.hpp"
#include "svito/random.hpp"
#include "svito/parallel.hpp"
#include "svito/stochastic.hpp"
#include "svito/selection.hpp"
#include "svito/report.hpp"
#include "svito/algebra_suite.hpp"
#include "svito/integrals.hpp"
#include "svito/ito_formula.hpp"
#include "svito/regression.hpp"
#include "svito/bsde.hpp"
#include "svito/config.hpp"
#include "svito/acceptance.hpp"
#include "svito/runner.hpp"
