#pragma once

#include "cmc/errors.hpp"
#include "cmc/jet.hpp"
#include "cmc/dual.hpp"
#include "cmc/expression.hpp"
#include "cmc/ambient.hpp"
#include "cmc/residuals.hpp"
#include "cmc/immersion.hpp"
#include "cmc/catalog.hpp"
#include "cmc/graph_solver.hpp"
#include "cmc/spectral.hpp"
#include "cmc/config.hpp"
#include "cmc/report.hpp"
#include "cmc/scenario.hpp"
