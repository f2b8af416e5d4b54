#pragma once

#include "fcs/core.hpp"
#include "fcs/diagnostics.hpp"
#include "fcs/entanglement.hpp"
#include "fcs/error.hpp"
#include "fcs/io.hpp"
#include "fcs/known_optima.hpp"
#include "fcs/linalg.hpp"
#include "fcs/optimizer.hpp"
#include "fcs/parametrization.hpp"
#include "fcs/verify.hpp"
