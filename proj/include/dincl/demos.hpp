#pragma once

#include "dincl/transcription.hpp"

namespace dincl {

/// Scalar exponential-decay instance: first order, dynamics v = -x,
/// x(0) = 1, minimize x(T), T = 1, N = 10. Optimal value 0.9^10.
ProblemSpec decay_problem();

/// Third-order scalar instance with control: x''' in [-1, 1], zero initial
/// position/velocity/acceleration, minimize x(T), T = 1. Bang-bang optimum.
ProblemSpec third_order_control_problem(int intervals = 64);

/// Fourth-order scalar polyhedral instance: v >= x/2 - 1 and v <= 1, zero
/// initial data up to third order, minimize x(T), T = 1.
ProblemSpec fourth_order_polyhedral_problem(int intervals = 16);

}  // namespace dincl
