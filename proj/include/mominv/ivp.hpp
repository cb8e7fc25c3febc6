#pragma once
// Initial value problems for the homogeneous linear ODE
//   p_N(x) u^(N) + ... + p_1(x) u' + p_0(x) u = 0
// integrated with an adaptive embedded Runge-Kutta 4(5) pair
// (Dormand-Prince coefficients), reporting the solution on a uniform grid.

#include <vector>

#include "mominv/diffop.hpp"

namespace mominv {

struct IvpSolution {
    std::vector<double> grid;    // n_out uniform points spanning [a, b]
    std::vector<double> values;  // u at the grid points
    // derivatives[s][i] = u^(s+1) at grid[i], s = 0 .. max(N-1, 1) - 1.
    // For a first-order problem the single row holds u' recovered from the ODE.
    std::vector<std::vector<double>> derivatives;

    double interp(double x) const;  // cubic Hermite between grid points
};

// Integrates from init.point (must equal a) to b. init.values supplies
// u(a), u'(a), ..., u^(N-1)(a). The leading coefficient p_N must not vanish
// on [a, b]; this is checked against 256 Chebyshev samples and the real roots
// of p_N before integrating. Step-size underflow raises an error.
IvpSolution solve_ivp(const DiffOperator& op, double a, double b, const Jet& init,
                      int n_out, double rtol = 1e-10, double atol = 1e-12);

}  // namespace mominv
