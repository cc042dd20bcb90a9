#pragma once

#include "levyme/me_dist.hpp"

namespace levyme {

/// The order-3 non-phase-type ME horizon with density (17/9) e^{-x} cos^2(2x):
/// alpha = (-8/9, -34/9, 17/3), T = [[0,-17,17],[3,2,-6],[2,2,-5]], t = -T 1.
/// Generator eigenvalues are -1 and -1 +/- 4i.
MERep paper_sec7_horizon();

} // namespace levyme
