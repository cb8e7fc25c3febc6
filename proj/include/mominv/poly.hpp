#pragma once
// Dense univariate polynomials over double, coefficients stored in ascending
// degree order. The zero polynomial is the empty coefficient vector; every
// operation trims trailing coefficients below 1e-13 * max|coeff| so that
// degree() is meaningful after cancellation.

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace mominv {

class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) { normalize(); }

    static Poly constant(double c) { return Poly({c}); }
    // c * x^degree
    static Poly monomial(int degree, double c = 1.0);
    // monic product of (x - r) over the given roots
    static Poly from_roots(const std::vector<double>& roots);

    // -1 for the zero polynomial
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    // coefficient of x^i, 0 outside the stored range
    double operator[](int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<size_t>(i)] : 0.0;
    }
    double leading() const;
    const std::vector<double>& coeffs() const { return c_; }
    double max_abs_coeff() const;

    double eval(double x) const;
    std::complex<double> eval(std::complex<double> x) const;
    Poly derivative(int order = 1) const;
    // p(x + t)
    Poly shifted_arg(double t) const;
    Poly monic() const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly& operator*=(double s);

private:
    void normalize();
    std::vector<double> c_;
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(Poly a, double s);
Poly operator*(double s, Poly a);
Poly pow(const Poly& p, int n);

// All complex roots of p (requires degree >= 1), sorted by (real, imag).
// Degrees 1 and 2 use closed forms; higher degrees use balanced
// companion-matrix eigenvalues (Hessenberg QR).
std::vector<std::complex<double>> roots(const Poly& p);

// Euclidean division: p = q*d + r with deg r < deg d. Requires d nonzero.
std::pair<Poly, Poly> divmod(const Poly& p, const Poly& d);

// Human-readable form, highest degree first, e.g. "k^2 - 2.5*k + 1".
std::string to_string(const Poly& p, const std::string& var = "x");

}  // namespace mominv
