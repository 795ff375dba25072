#pragma once

#include "ahmass/error.hpp"
#include "ahmass/linalg.hpp"
#include "ahmass/summation.hpp"
#include "ahmass/model_space.hpp"
#include "ahmass/sphere_quadrature.hpp"
#include "ahmass/graph_geometry.hpp"
#include "ahmass/graph_library.hpp"
#include "ahmass/intrinsic_oracle.hpp"
#include "ahmass/mass_engine.hpp"
#include "ahmass/config.hpp"
#include "ahmass/report.hpp"
#include "ahmass/cli.hpp"
