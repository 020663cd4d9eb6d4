#pragma once

#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "model.hpp"
#include "steadystate.hpp"
#include "sweep.hpp"
#include "units.hpp"
#include "verify.hpp"
