#pragma once

// Everything in one include.
#include "mot/affine_expr.hpp"
#include "mot/dual_hedge.hpp"
#include "mot/errors.hpp"
#include "mot/lp.hpp"
#include "mot/market_data.hpp"
#include "mot/matrix.hpp"
#include "mot/measure.hpp"
#include "mot/monotone_plan.hpp"
#include "mot/payoff.hpp"
#include "mot/rational.hpp"
#include "mot/transport_plan.hpp"
