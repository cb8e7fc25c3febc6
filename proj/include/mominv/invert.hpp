#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mominv/diffop.hpp"
#include "mominv/shiftop.hpp"
#include "mominv/signal.hpp"

namespace mominv {

enum class ModelKind { piecewise_polynomial, sinusoid, rational, exponential };

std::string kind_to_string(ModelKind k);
ModelKind kind_from_string(const std::string& s);

// Unknown layout of the operator-recovery system: one stripe per derivative
// order j carrying the coefficients a_{0,j} .. a_{d_j,j}.
struct StripeSpec {
    std::vector<std::pair<int, int>> entries;  // (j, d_j), j distinct ascending

    int unknowns() const;    // sum of (d_j + 1)
    int order() const;       // max j
    int max_degree() const;  // max d_j
    void validate() const;
};

// Smallest admissible top moment index for build_H: rows-1 + 2*order + max d_j
// (the worst moment index any matrix entry can address).
int min_moment_index(const StripeSpec& spec, int order, int rows);

// rows x unknowns matrix with H(k, col(i,j)) = shifted moment of the (i,j)
// monomial term at row k; columns grouped stripe by stripe, so each stripe is
// Hankel along anti-diagonals. Throws when the sequence is shorter than
// min_moment_index demands, naming the minimum.
Eigen::MatrixXd build_H(const MomentSequence& m, const StripeSpec& spec, int order,
                        int rows);

struct NullspaceResult {
    std::vector<double> coeffs;  // unknown vector with the last entry pinned to 1
    double condition = 0.0;      // of the reduced system, from its singular values
    bool success = false;
    std::string failure_reason;
};

// Pin the last unknown to 1 and solve the reduced system: Gaussian elimination
// with partial pivoting when it is square (rows == unknowns - 1), column-pivoted
// QR least squares when there are extra rows.
NullspaceResult solve_nullspace(const Eigen::MatrixXd& H);

struct DecodeResult {
    std::vector<double> jumps;  // ascending, strictly inside (a, b)
    DiffOperator op_inner;      // op_hat with the jump factor divided out
    double root_residual = 0.0; // worst relative deflation remainder
    bool success = false;
    std::string failure_reason;
};

// Jump recovery: every nonzero coefficient of op_hat carries the jumps as
// roots of multiplicity `multiplicity`. Per coefficient: cluster the roots
// (threshold clustering first, count-forced fallback when the degree says the
// polynomial is exactly the jump factor times a constant), refine the centers
// with the multiplicity structure imposed, then average matched centers across
// coefficients. A center outside (a, b) or essentially complex fails the run
// with reason "jump outside interval"; an irreconcilable cluster count fails
// with "cluster count mismatch". cluster_tol 0 picks the multiplicity default.
DecodeResult decode_jumps(const DiffOperator& op_hat, int n_jumps, int multiplicity,
                          double a, double b, double cluster_tol = 0.0);

struct BasisSet {
    std::vector<std::function<double(double)>> funcs;
    double omega = 0.0;  // sinusoid kind only
    double beta = 0.0;   // exponential kind only
    bool success = false;
    std::string failure_reason;
};

// Solution basis of op_inner y = 0 on one piece: {1, x, .., x^d} for
// piecewise polynomials; {sin wx, cos wx} for the sinusoid kind with
// w^2 = c_0/c_2 read off the deflated constant coefficients; the normalized
// initial-value solution u (u(a) = 1) for rational and exponential kinds,
// computed analytically for the exponential and by integration for rational.
BasisSet basis_for_nullspace(const DiffOperator& op_inner, ModelKind kind, double a,
                             double b, double ivp_rtol = 1e-10, double ivp_atol = 1e-12);

struct FitResult {
    std::vector<double> alphas;  // piece-major: alphas[n * basis_count + i]
    double condition = 0.0;
    double residual = 0.0;  // relative, over the rows used
    bool success = false;
    std::string failure_reason;
};

// Moment-matching stage: C(k, (i,n)) = integral of x^k u_i over piece n
// (composite Gauss-Legendre), solved by column-pivoted QR least squares.
// With scale_to_m0 (single basis function, no jumps) the coefficient is fixed
// by matching the zeroth moment exactly instead.
FitResult build_C_and_solve(const std::vector<std::function<double(double)>>& basis,
                            const std::vector<double>& jumps, const MomentSequence& m,
                            int rows, bool scale_to_m0 = false);

struct ModelParams {
    int n_jumps = 0;
    int degree = 0;      // piecewise-polynomial piece degree
    int num_degree = 0;  // rational numerator degree
    int den_degree = 0;  // rational denominator degree
};

struct Diagnostics {
    double H_condition = 0.0;
    double root_residual = 0.0;
    double C_condition = 0.0;
    double fit_residual = 0.0;
};

struct ReconstructionResult {
    bool success = false;
    std::string failure_reason;  // empty on success
    std::string failed_stage;    // "H", "nullspace", "decode", "basis", "fit"
    double a = 0.0, b = 1.0;
    DiffOperator op_hat;    // recovered annihilator, last stripe pinned monic
    DiffOperator op_inner;  // jump factor divided out
    std::vector<double> jumps;
    double omega = 0.0;
    double beta = 0.0;
    std::vector<double> alphas;  // piece-major
    std::vector<std::function<double(double)>> basis;
    Diagnostics diagnostics;
};

struct ReconstructOptions {
    double cluster_tol = 0.0;  // 0: multiplicity-based default + count fallback
    int c_rows = 0;            // 0: min(available moments, unknowns + 4)
    double ivp_rtol = 1e-10;   // basis IVP integration tolerances (rational kind)
    double ivp_atol = 1e-12;
};

StripeSpec stripe_spec_for(ModelKind kind, const ModelParams& p);
int h_rows_for(ModelKind kind, const ModelParams& p);

// The full pipeline: build_H -> solve_nullspace -> decode_jumps ->
// basis_for_nullspace -> build_C_and_solve. Stage failures come back as a
// flagged result (failed_stage + failure_reason), not exceptions; only
// malformed arguments throw.
ReconstructionResult reconstruct(ModelKind kind, const MomentSequence& m,
                                 const ModelParams& params,
                                 const ReconstructOptions& opts = {});

// Evaluate the reconstructed model on a uniform n-point grid over [a, b].
SampledSignal render(const ReconstructionResult& r, int n);

}  // namespace mominv
