#pragma once

namespace hfbi {

// Hurwitz zeta  zeta(s, a) = sum_{k>=0} (a + k)^-s  for s > 1, a >= 1.
// Direct summation with an Euler-Maclaurin tail; relative error < 1e-12
// over the exponent range used here (s in (1.01, 6]).
double hurwitz_zeta(double s, double a);

}  // namespace hfbi
