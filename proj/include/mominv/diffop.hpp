#pragma once
// Linear differential operators with polynomial coefficients,
//   D = sum_{j=0}^{N} p_j(x) d^j/dx^j.
// The order N is the index of the highest nonzero coefficient; constructors
// trim trailing zero coefficient polynomials.

#include <vector>

#include "mominv/poly.hpp"

namespace mominv {

class DiffOperator {
public:
    DiffOperator() = default;
    explicit DiffOperator(std::vector<Poly> coeffs);

    bool is_zero() const { return coeffs_.empty(); }
    // -1 for the zero operator
    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    // coefficient of d^j/dx^j; the zero polynomial outside the stored range
    const Poly& coeff(int j) const;
    const std::vector<Poly>& coeffs() const { return coeffs_; }
    int max_coeff_degree() const;

private:
    std::vector<Poly> coeffs_;
};

// D f for a polynomial f.
Poly apply_to_poly(const DiffOperator& op, const Poly& f);

// The operator q(x) * D (left multiplication by a polynomial).
DiffOperator multiply_by_poly(const DiffOperator& op, const Poly& q);

// Formal adjoint applied to a monomial: D*(x^k) = sum_j (-1)^j (p_j x^k)^(j).
Poly adjoint_on_monomial(const DiffOperator& op, int k);

// Derivative values of a function at one point: values[s] = f^(s)(point).
struct Jet {
    double point = 0.0;
    std::vector<double> values;
};

// Bilinear boundary form paired with the monomial x^k, evaluated at u.point:
//   P(u, x^k) = sum_{s=0}^{N-1} u^(s) * sum_{t=0}^{N-1-s} (-1)^t (p_{s+t+1} x^k)^(t).
// u must supply at least N derivative values (f, f', ..., f^(N-1)).
double concomitant(const DiffOperator& op, const Jet& u, int k);

// eps_k = P(f, x^k)|_b - P(f, x^k)|_a for k = 0..count-1. The jets carry the
// endpoint locations; at_a.point < at_b.point is required.
std::vector<double> boundary_sequence(const DiffOperator& op, const Jet& at_a,
                                      const Jet& at_b, int count);

}  // namespace mominv
