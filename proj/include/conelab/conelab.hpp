#pragma once

#include "conelab/core.hpp"
#include "conelab/polynomial.hpp"
#include "conelab/cone_geometry.hpp"
#include "conelab/symbol_algebra.hpp"
#include "conelab/asymptotics.hpp"
#include "conelab/mellin_sobolev.hpp"
#include "conelab/bessel.hpp"
#include "conelab/heat_solver.hpp"
#include "conelab/tip_analysis.hpp"
#include "conelab/power_calculus.hpp"
#include "conelab/config.hpp"
#include "conelab/io.hpp"
#include "conelab/verification.hpp"
