#include "mominv/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mominv {

namespace {
constexpr double kTrimRel = 1e-13;
}

void Poly::normalize() {
    double m = 0.0;
    for (double c : c_) m = std::max(m, std::abs(c));
    if (m == 0.0) {
        c_.clear();
        return;
    }
    while (!c_.empty() && std::abs(c_.back()) <= kTrimRel * m) c_.pop_back();
}

Poly Poly::monomial(int degree, double c) {
    if (degree < 0) throw std::invalid_argument("monomial: negative degree");
    std::vector<double> v(static_cast<size_t>(degree) + 1, 0.0);
    v.back() = c;
    return Poly(std::move(v));
}

Poly Poly::from_roots(const std::vector<double>& roots) {
    Poly p = Poly::constant(1.0);
    for (double r : roots) p *= Poly({-r, 1.0});
    return p;
}

double Poly::leading() const {
    if (is_zero()) throw std::domain_error("leading coefficient of zero polynomial");
    return c_.back();
}

double Poly::max_abs_coeff() const {
    double m = 0.0;
    for (double c : c_) m = std::max(m, std::abs(c));
    return m;
}

double Poly::eval(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::complex<double> Poly::eval(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly Poly::derivative(int order) const {
    if (order < 0) throw std::invalid_argument("derivative: negative order");
    std::vector<double> v = c_;
    for (int pass = 0; pass < order; ++pass) {
        if (v.empty()) break;
        for (size_t i = 1; i < v.size(); ++i) v[i - 1] = v[i] * static_cast<double>(i);
        v.pop_back();
    }
    return Poly(std::move(v));
}

Poly Poly::shifted_arg(double t) const {
    // Horner in (x + t): result = (((c_n)(x+t) + c_{n-1})(x+t) + ...)
    Poly acc;
    const Poly xt({t, 1.0});
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc *= xt;
        acc += Poly::constant(*it);
    }
    return acc;
}

Poly Poly::monic() const {
    if (is_zero()) throw std::domain_error("monic: zero polynomial");
    Poly p = *this;
    const double lead = p.c_.back();
    for (double& c : p.c_) c /= lead;
    p.c_.back() = 1.0;
    return p;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    normalize();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    normalize();
    return *this;
}

Poly& Poly::operator*=(const Poly& o) {
    if (is_zero() || o.is_zero()) {
        c_.clear();
        return *this;
    }
    std::vector<double> out(c_.size() + o.c_.size() - 1, 0.0);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) out[i + j] += c_[i] * o.c_[j];
    c_ = std::move(out);
    normalize();
    return *this;
}

Poly& Poly::operator*=(double s) {
    for (double& c : c_) c *= s;
    normalize();
    return *this;
}

Poly operator+(Poly a, const Poly& b) { return a += b; }
Poly operator-(Poly a, const Poly& b) { return a -= b; }
Poly operator*(const Poly& a, const Poly& b) {
    Poly r = a;
    return r *= b;
}
Poly operator*(Poly a, double s) { return a *= s; }
Poly operator*(double s, Poly a) { return a *= s; }

Poly pow(const Poly& p, int n) {
    if (n < 0) throw std::invalid_argument("pow: negative exponent");
    Poly r = Poly::constant(1.0);
    for (int i = 0; i < n; ++i) r *= p;
    return r;
}

std::vector<std::complex<double>> roots(const Poly& p) {
    if (p.is_zero()) throw std::domain_error("roots: zero polynomial");
    const int n = p.degree();
    if (n < 1) throw std::domain_error("roots: constant polynomial");

    std::vector<std::complex<double>> out;
    if (n == 1) {
        out.push_back({-p[0] / p[1], 0.0});
    } else if (n == 2) {
        // stable quadratic formula, avoids cancellation in -b +- sqrt(disc)
        const double a = p[2], b = p[1], c = p[0];
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
            if (q != 0.0) {
                out.push_back({q / a, 0.0});
                out.push_back({c / q, 0.0});
            } else {  // b == 0 and disc == 0
                out.push_back({0.0, 0.0});
                out.push_back({0.0, 0.0});
            }
        } else {
            const double re = -b / (2.0 * a), im = std::sqrt(-disc) / (2.0 * a);
            out.push_back({re, -std::abs(im)});
            out.push_back({re, std::abs(im)});
        }
    } else {
        const Poly m = p.monic();
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n - 1; ++i) C(i + 1, i) = 1.0;
        for (int i = 0; i < n; ++i) C(i, n - 1) = -m[i];
        Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success) throw std::runtime_error("roots: eigensolver failed");
        for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()[i]);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

std::pair<Poly, Poly> divmod(const Poly& p, const Poly& d) {
    if (d.is_zero()) throw std::domain_error("divmod: division by zero polynomial");
    if (p.degree() < d.degree()) return {Poly(), p};
    std::vector<double> rem(p.coeffs());
    const int dn = d.degree();
    const double lead = d[dn];
    std::vector<double> quo(static_cast<size_t>(p.degree() - dn) + 1, 0.0);
    for (int i = p.degree(); i >= dn; --i) {
        const double f = rem[static_cast<size_t>(i)] / lead;
        quo[static_cast<size_t>(i - dn)] = f;
        for (int j = 0; j <= dn; ++j) rem[static_cast<size_t>(i - dn + j)] -= f * d[j];
        rem[static_cast<size_t>(i)] = 0.0;  // cancel exactly
    }
    rem.resize(static_cast<size_t>(std::max(dn, 0)));
    return {Poly(std::move(quo)), Poly(std::move(rem))};
}

std::string to_string(const Poly& p, const std::string& var) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
        const double c = p[i];
        if (c == 0.0) continue;
        if (first) {
            if (c < 0.0) os << "-";
        } else {
            os << (c < 0.0 ? " - " : " + ");
        }
        const double ac = std::abs(c);
        const bool unit = (ac == 1.0) && i > 0;
        if (!unit) os << ac;
        if (i > 0) {
            if (!unit) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

}  // namespace mominv
