#include "mominv/diffop.hpp"

#include <stdexcept>

namespace mominv {

namespace {
const Poly kZeroPoly{};
}

DiffOperator::DiffOperator(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

const Poly& DiffOperator::coeff(int j) const {
    if (j < 0 || j >= static_cast<int>(coeffs_.size())) return kZeroPoly;
    return coeffs_[static_cast<size_t>(j)];
}

int DiffOperator::max_coeff_degree() const {
    int d = -1;
    for (const Poly& p : coeffs_) d = std::max(d, p.degree());
    return d;
}

Poly apply_to_poly(const DiffOperator& op, const Poly& f) {
    Poly out;
    for (int j = 0; j <= op.order(); ++j) out += op.coeff(j) * f.derivative(j);
    return out;
}

DiffOperator multiply_by_poly(const DiffOperator& op, const Poly& q) {
    std::vector<Poly> cs;
    cs.reserve(op.coeffs().size());
    for (const Poly& p : op.coeffs()) cs.push_back(q * p);
    return DiffOperator(std::move(cs));
}

Poly adjoint_on_monomial(const DiffOperator& op, int k) {
    if (k < 0) throw std::invalid_argument("adjoint_on_monomial: negative power");
    Poly out;
    const Poly xk = Poly::monomial(k);
    for (int j = 0; j <= op.order(); ++j) {
        Poly term = (op.coeff(j) * xk).derivative(j);
        if (j % 2 != 0) term *= -1.0;
        out += term;
    }
    return out;
}

double concomitant(const DiffOperator& op, const Jet& u, int k) {
    if (op.is_zero()) throw std::invalid_argument("concomitant: zero operator");
    if (k < 0) throw std::invalid_argument("concomitant: negative power");
    const int n = op.order();
    if (static_cast<int>(u.values.size()) < n)
        throw std::invalid_argument("concomitant: jet shorter than operator order");
    const Poly xk = Poly::monomial(k);
    double acc = 0.0;
    for (int s = 0; s < n; ++s) {
        Poly ts;
        for (int t = 0; t + s < n; ++t) {
            Poly d = (op.coeff(s + t + 1) * xk).derivative(t);
            if (t % 2 != 0) d *= -1.0;
            ts += d;
        }
        acc += u.values[static_cast<size_t>(s)] * ts.eval(u.point);
    }
    return acc;
}

std::vector<double> boundary_sequence(const DiffOperator& op, const Jet& at_a,
                                      const Jet& at_b, int count) {
    if (!(at_a.point < at_b.point))
        throw std::invalid_argument("boundary_sequence: endpoints out of order");
    std::vector<double> eps;
    eps.reserve(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k)
        eps.push_back(concomitant(op, at_b, k) - concomitant(op, at_a, k));
    return eps;
}

}  // namespace mominv
