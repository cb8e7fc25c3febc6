#pragma once

#include <complex>
#include <vector>

#include "mominv/poly.hpp"

namespace mominv {

// A group of nearby roots interpreted as one root of higher multiplicity.
struct RootCluster {
    std::complex<double> center;
    int multiplicity = 0;
    std::vector<std::complex<double>> members;  // size == multiplicity
};

// 10 * eps^(1/max_multiplicity) * scale. A root of multiplicity m moves like
// (coefficient error)^(1/m), so this is the expected scatter when the only
// error is roundoff in the coefficients.
double default_cluster_tol(int max_multiplicity, double scale);

// Single-linkage clustering with threshold tol: roots closer than tol are
// chained into one cluster. Centers are arithmetic means; a center with
// |imag| < tol is projected onto the real axis. Output is sorted by
// (re, im) of center and does not depend on input order.
std::vector<RootCluster> cluster_roots(const std::vector<std::complex<double>>& roots,
                                       double tol);

// Single-linkage merging until exactly `count` clusters remain, for when the
// cluster count is known but the scatter scale is not. No real projection.
std::vector<RootCluster> cluster_to_count(const std::vector<std::complex<double>>& roots,
                                          int count);

struct RefineResult {
    std::vector<RootCluster> clusters;  // input order, centers refined
    double residual = 0.0;              // coefficient-space l2 distance at exit
    bool converged = false;
};

// Holding the multiplicity structure fixed, minimize
//   || coeffs( prod (x - z_i)^{m_i} ) - coeffs( monic p ) ||_2
// over the centers z_i by Gauss-Newton with backtracking halving (residual
// never increases). Stops at relative step < 1e-12 or 50 iterations; a run
// that exhausts the budget returns the best iterate with converged = false.
// Requires sum of multiplicities == deg p.
RefineResult refine_structured(const Poly& p, std::vector<RootCluster> clusters);

}  // namespace mominv
