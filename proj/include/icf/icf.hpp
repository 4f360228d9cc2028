#pragma once

#include "icf/cfraction_fit.hpp"
#include "icf/continued_fraction.hpp"
#include "icf/errors.hpp"
#include "icf/expression.hpp"
#include "icf/grid_function.hpp"
#include "icf/integral_fraction.hpp"
#include "icf/node_system.hpp"
#include "icf/serialize.hpp"
