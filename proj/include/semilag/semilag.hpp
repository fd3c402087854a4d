#pragma once

#include "semilag/analysis.hpp"
#include "semilag/config.hpp"
#include "semilag/cost.hpp"
#include "semilag/csv.hpp"
#include "semilag/dynamics.hpp"
#include "semilag/error.hpp"
#include "semilag/expr.hpp"
#include "semilag/grid.hpp"
#include "semilag/problem.hpp"
#include "semilag/random.hpp"
#include "semilag/solver.hpp"
#include "semilag/time_grid.hpp"
#include "semilag/vec.hpp"
