#pragma once
// Shift operators on moment sequences: finite sums S = sum_r c_r(k) E^r with
// polynomial-in-k coefficients, where (E^r m)(k) = m(k+r). These encode linear
// recurrences c_0(k) m_k + c_1(k) m_{k+1} + ... = 0 for the moments
// m_k = int_a^b x^k f(x) dx of functions annihilated by a differential
// operator on [a, b].

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mominv/diffop.hpp"
#include "mominv/poly.hpp"

namespace mominv {

class ShiftOperator {
public:
    ShiftOperator() = default;

    bool is_zero() const { return terms_.empty(); }
    int min_offset() const;
    int max_offset() const;
    const std::map<int, Poly>& terms() const { return terms_; }
    // coefficient polynomial at the given offset; zero polynomial if absent
    const Poly& coeff(int offset) const;

    void add_term(int offset, const Poly& c);
    // drop terms whose coefficients are all below 1e-13 * (largest entry in
    // the whole operator); guards against floating cancellation in compose
    void collect();

private:
    std::map<int, Poly> terms_;
};

// Pochhammer-style falling factorial (x)_(j) = x (x-1) ... (x-j+1); the empty
// product (j = 0) is 1. Exactly zero at integer x in {0, ..., j-1}.
double falling_factorial(double x, int j);
// (k + shift)_(j) as a polynomial in k.
Poly falling_factorial_poly(int j, double shift);

// Recurrence term for the differential monomial x^i d^j/dx^j:
//   (-1)^j (i+k)_(j) E^{i-j}.
ShiftOperator mellin_term(int i, int j);

// Formal Mellin transform of D: the shift operator M with
// (M m)(k) = int_a^b (D f)(x) x^k dx - boundary terms, m the moments of f.
ShiftOperator mellin_transform(const DiffOperator& op);

// Constant-coefficient shift operator q(E) from a polynomial q.
ShiftOperator shift_from_poly(const Poly& q);

// (E - a)^order (E - b)^order: annihilates the boundary sequence of every
// order-`order` operator on [a, b] (the sequences b^k q_b(k) - a^k q_a(k)
// with deg q < order).
ShiftOperator boundary_annihilator(int order, double a, double b);

// Operator composition (s1 . s2): c(k) E^r composed with c'(k) E^s gives
// c(k) c'(k+r) E^{r+s}.
ShiftOperator compose(const ShiftOperator& s1, const ShiftOperator& s2);

// compose(boundary_annihilator(order(op), a, b), mellin_transform(op)):
// annihilates the moment sequence of every function annihilated by op on
// [a, b], regardless of boundary values.
ShiftOperator moment_annihilator(const DiffOperator& op, double a, double b);

// Left-multiply by E^t so the minimal offset becomes 0; returns {result, t}.
std::pair<ShiftOperator, int> normalize_offsets(const ShiftOperator& s);

struct MomentSequence {
    std::vector<double> values;  // values[k] = m_k
    double a = 0.0;
    double b = 1.0;
    int max_index() const { return static_cast<int>(values.size()) - 1; }
};

// sum_r c_r(k) m[k+r]; requires the full window [k+min_offset, k+max_offset]
// to lie inside [0, m.size()-1].
double apply(const ShiftOperator& s, std::span<const double> m, int k);
double apply(const ShiftOperator& s, const MomentSequence& m, int k);

// Shifted moment: (boundary_annihilator(order, a, b) . mellin_term(i, j))
// applied to m at index k. Terms whose falling-factorial coefficient vanishes
// at this k are skipped exactly; these are precisely the terms that would
// address negative moment indices, so any k >= 0 is valid given enough upper
// moments (k + i + 2*order of them).
double shifted_moment(int i, int j, int k, const MomentSequence& m, int order);

// "(c_0(k))*m_k + (c_1(k))*m_{k+1} + ... = 0" rendering, offsets ascending.
std::string to_string(const ShiftOperator& s);

// termwise comparison: coefficients differ by at most tol * max(1, scale)
bool approx_equal(const ShiftOperator& x, const ShiftOperator& y, double tol);

}  // namespace mominv
