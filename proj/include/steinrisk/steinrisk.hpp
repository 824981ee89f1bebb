#pragma once

#include "steinrisk/bayes_identity.hpp"
#include "steinrisk/chisq.hpp"
#include "steinrisk/minimax.hpp"
#include "steinrisk/model.hpp"
#include "steinrisk/philox.hpp"
#include "steinrisk/quadrature.hpp"
#include "steinrisk/risk.hpp"
#include "steinrisk/shrinkage.hpp"
