#pragma once

#include "lurecert/config.hpp"

namespace lurecert::builtin {

/// Demo problem 1: a three-state positive network with a diagonal
/// slope-plus-sine feedback near its stability margin and a forcing that
/// converges to a constant.
LureSystem example1_system();
Nonlinearity example1_nonlinearity(double slope = 89.0);
Signal example1_forcing(double k);
Vector example1_x0_a(double k);  // 4k * (-1, 1, 1)
Vector example1_x0_b(double k);  // 4k * (-1, 0, -1)

/// Full configuration for the demo-1 pipeline at forcing scale k.
ProblemConfig example1_config(double k = 3.0);

/// Demo problem 2: a four-state chain with scalar saturation feedback, used
/// for input-output certificates and (almost) periodic response studies.
LureSystem example2_system();
/// Variant with the incremental gain absorbed into the state matrix
/// (A replaced by A + B1 Delta C1); its zero-frequency feedback gain exceeds
/// one, exercising the no-contraction error path.
LureSystem example2_absorbed_system();
Nonlinearity example2_nonlinearity();

Signal example2_almost_periodic();            // sin(2 pi t) + sin(2 sqrt(3) pi t)
Signal example2_asymptotically_ap();          // 5 t e^{-t} + the above
Signal example2_stepanov();                   // discontinuous, Stepanov almost periodic
Signal example2_asymptotically_stepanov();    // 5 t e^{-t/4} + the above
Signal example2_periodic();                   // 1 + sin(2 pi t), period 1

ProblemConfig example2_config();

}  // namespace lurecert::builtin
