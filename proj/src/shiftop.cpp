#include "mominv/shiftop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mominv {

namespace {
constexpr double kCollectRel = 1e-13;
const Poly kZeroPoly{};
}  // namespace

int ShiftOperator::min_offset() const {
    if (terms_.empty()) throw std::domain_error("min_offset: zero operator");
    return terms_.begin()->first;
}

int ShiftOperator::max_offset() const {
    if (terms_.empty()) throw std::domain_error("max_offset: zero operator");
    return terms_.rbegin()->first;
}

const Poly& ShiftOperator::coeff(int offset) const {
    const auto it = terms_.find(offset);
    return it == terms_.end() ? kZeroPoly : it->second;
}

void ShiftOperator::add_term(int offset, const Poly& c) {
    if (c.is_zero()) return;
    Poly& slot = terms_[offset];
    slot += c;
    if (slot.is_zero()) terms_.erase(offset);
}

void ShiftOperator::collect() {
    double scale = 0.0;
    for (const auto& [off, c] : terms_) scale = std::max(scale, c.max_abs_coeff());
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.is_zero() || it->second.max_abs_coeff() < kCollectRel * scale)
            it = terms_.erase(it);
        else
            ++it;
    }
}

double falling_factorial(double x, int j) {
    if (j < 0) throw std::invalid_argument("falling_factorial: negative length");
    double acc = 1.0;
    for (int t = 0; t < j; ++t) acc *= (x - t);
    return acc;
}

Poly falling_factorial_poly(int j, double shift) {
    if (j < 0) throw std::invalid_argument("falling_factorial_poly: negative length");
    Poly acc = Poly::constant(1.0);
    for (int t = 0; t < j; ++t) acc *= Poly({shift - t, 1.0});
    return acc;
}

ShiftOperator mellin_term(int i, int j) {
    if (i < 0 || j < 0) throw std::invalid_argument("mellin_term: negative exponent");
    ShiftOperator s;
    Poly c = falling_factorial_poly(j, static_cast<double>(i));
    if (j % 2 != 0) c *= -1.0;
    s.add_term(i - j, c);
    return s;
}

ShiftOperator mellin_transform(const DiffOperator& op) {
    if (op.is_zero()) throw std::invalid_argument("mellin_transform: zero operator");
    ShiftOperator s;
    for (int j = 0; j <= op.order(); ++j) {
        const Poly& pj = op.coeff(j);
        for (int i = 0; i <= pj.degree(); ++i) {
            const double a = pj[i];
            if (a == 0.0) continue;
            Poly c = falling_factorial_poly(j, static_cast<double>(i)) * a;
            if (j % 2 != 0) c *= -1.0;
            s.add_term(i - j, c);
        }
    }
    s.collect();
    return s;
}

ShiftOperator shift_from_poly(const Poly& q) {
    ShiftOperator s;
    for (int i = 0; i <= q.degree(); ++i)
        if (q[i] != 0.0) s.add_term(i, Poly::constant(q[i]));
    return s;
}

ShiftOperator boundary_annihilator(int order, double a, double b) {
    if (order < 0) throw std::invalid_argument("boundary_annihilator: negative order");
    Poly q = Poly::constant(1.0);
    for (int t = 0; t < order; ++t) q *= Poly({-a, 1.0}) * Poly({-b, 1.0});
    return shift_from_poly(q);
}

ShiftOperator compose(const ShiftOperator& s1, const ShiftOperator& s2) {
    ShiftOperator out;
    for (const auto& [r, c1] : s1.terms())
        for (const auto& [s, c2] : s2.terms())
            out.add_term(r + s, c1 * c2.shifted_arg(static_cast<double>(r)));
    out.collect();
    return out;
}

ShiftOperator moment_annihilator(const DiffOperator& op, double a, double b) {
    return compose(boundary_annihilator(op.order(), a, b), mellin_transform(op));
}

std::pair<ShiftOperator, int> normalize_offsets(const ShiftOperator& s) {
    if (s.is_zero()) throw std::domain_error("normalize_offsets: zero operator");
    const int t = -s.min_offset();
    if (t == 0) return {s, 0};
    ShiftOperator e;
    e.add_term(t, Poly::constant(1.0));
    return {compose(e, s), t};
}

double apply(const ShiftOperator& s, std::span<const double> m, int k) {
    if (s.is_zero()) return 0.0;
    const int lo = k + s.min_offset(), hi = k + s.max_offset();
    if (lo < 0 || hi >= static_cast<int>(m.size()))
        throw std::out_of_range("apply: recurrence window [m_" + std::to_string(lo) +
                                ", m_" + std::to_string(hi) + "] outside the sequence");
    double acc = 0.0;
    for (const auto& [r, c] : s.terms())
        acc += c.eval(static_cast<double>(k)) * m[static_cast<size_t>(k + r)];
    return acc;
}

double apply(const ShiftOperator& s, const MomentSequence& m, int k) {
    return apply(s, std::span<const double>(m.values), k);
}

double shifted_moment(int i, int j, int k, const MomentSequence& m, int order) {
    if (i < 0 || j < 0 || k < 0)
        throw std::invalid_argument("shifted_moment: negative index");
    const ShiftOperator ba = boundary_annihilator(order, m.a, m.b);
    const double sign = (j % 2 != 0) ? -1.0 : 1.0;
    double acc = 0.0;
    for (const auto& [u, cu] : ba.terms()) {
        const double ff = falling_factorial(static_cast<double>(i + k + u), j);
        if (ff == 0.0) continue;  // exactly the terms addressing negative indices
        const int idx = k + u + i - j;
        if (idx > m.max_index())
            throw std::out_of_range("shifted_moment: needs m_" + std::to_string(idx) +
                                    " but sequence ends at m_" +
                                    std::to_string(m.max_index()));
        acc += cu[0] * sign * ff * m.values[static_cast<size_t>(idx)];
    }
    return acc;
}

std::string to_string(const ShiftOperator& s) {
    if (s.is_zero()) return "0 = 0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [r, c] : s.terms()) {
        if (!first) os << " + ";
        os << "(" << to_string(c, "k") << ")*m_";
        if (r == 0)
            os << "k";
        else if (r > 0)
            os << "{k+" << r << "}";
        else
            os << "{k" << r << "}";
        first = false;
    }
    os << " = 0";
    return os.str();
}

bool approx_equal(const ShiftOperator& x, const ShiftOperator& y, double tol) {
    double scale = 0.0;
    for (const auto& [r, c] : x.terms()) scale = std::max(scale, c.max_abs_coeff());
    for (const auto& [r, c] : y.terms()) scale = std::max(scale, c.max_abs_coeff());
    const double thr = tol * std::max(1.0, scale);
    std::vector<int> offs;
    for (const auto& [r, c] : x.terms()) offs.push_back(r);
    for (const auto& [r, c] : y.terms()) offs.push_back(r);
    std::sort(offs.begin(), offs.end());
    offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
    for (int r : offs) {
        const Poly diff = x.coeff(r) - y.coeff(r);
        if (diff.max_abs_coeff() > thr) return false;
    }
    return true;
}

}  // namespace mominv
