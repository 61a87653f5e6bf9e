#pragma once

#include "expsamp/error.hpp"
#include "expsamp/quadrature.hpp"
#include "expsamp/kernels.hpp"
#include "expsamp/kernel_metrics.hpp"
#include "expsamp/function_handle.hpp"
#include "expsamp/operators.hpp"
#include "expsamp/properties.hpp"
#include "expsamp/orlicz.hpp"
#include "expsamp/test_functions.hpp"
#include "expsamp/oracle.hpp"
#include "expsamp/harness.hpp"
