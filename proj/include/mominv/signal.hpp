#pragma once
// Piecewise signal models on an interval [a, b], their sampling on uniform
// grids, additive Gaussian noise at a prescribed SNR, and power moments
// m_k = int_a^b x^k f(x) dx computed either in closed form or by quadrature
// from samples.

#include <cstdint>
#include <variant>
#include <vector>

#include "mominv/diffop.hpp"
#include "mominv/poly.hpp"
#include "mominv/shiftop.hpp"

namespace mominv {

struct PolynomialPiece {
    Poly poly;
};
// A sin(omega x + phase)
struct SinusoidPiece {
    double amplitude = 1.0;
    double omega = 1.0;
    double phase = 0.0;
};
// alpha e^{beta x}
struct ExponentialPiece {
    double alpha = 1.0;
    double beta = 0.0;
};
// num/den; den must not vanish on the closed piece interval
struct RationalPiece {
    Poly num, den;
};
// solution of op u = 0 with u, u', ... given at the piece's left edge
struct OdePiece {
    DiffOperator op;
    std::vector<double> init;
};

using PieceModel =
    std::variant<PolynomialPiece, SinusoidPiece, ExponentialPiece, RationalPiece, OdePiece>;

struct PiecewiseSignal {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> breakpoints;  // strictly increasing, inside (a, b)
    std::vector<PieceModel> pieces;   // breakpoints.size() + 1 entries

    void validate() const;
    // a, breakpoints..., b
    std::vector<double> edges() const;
    // piece containing x; right-continuous at breakpoints
    size_t piece_index(double x) const;
};

struct SampledSignal {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> values;

    size_t size() const { return values.size(); }
    double x(size_t i) const {
        return a + (b - a) * static_cast<double>(i) / static_cast<double>(values.size() - 1);
    }
};

// Closed-form value at x; throws for ode pieces (those exist only on grids).
double eval_at(const PiecewiseSignal& f, double x);

// Uniform n-point grid over [a, b] (n >= 2); at a breakpoint the right piece
// wins. Ode pieces are integrated once per piece and interpolated.
SampledSignal sample(const PiecewiseSignal& f, int n);

// Additive white Gaussian noise with variance mean(values^2) / 10^(snr_db/10).
// mt19937_64 + Box-Muller from 53-bit uniforms: the same seed reproduces the
// same noise bit-for-bit on any conforming platform.
SampledSignal add_noise(const SampledSignal& s, double snr_db, std::uint64_t seed);

// Trapezoid-rule moments m_0..m_K from samples.
MomentSequence moments_quadrature(const SampledSignal& s, int K);

// Exact moments via per-piece closed forms (polynomial: power rule;
// x^k e^{beta x} and x^k sin/cos: integration-by-parts downward recursion).
// Rational and ode pieces have no closed form and raise an error.
MomentSequence moments_exact(const PiecewiseSignal& f, int K);

// Mean squared difference; grids must match exactly.
double mse(const SampledSignal& x, const SampledSignal& y);

}  // namespace mominv
