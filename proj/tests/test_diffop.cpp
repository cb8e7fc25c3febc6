#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "mominv/diffop.hpp"
#include "mominv/poly.hpp"

using mominv::DiffOperator;
using mominv::Jet;
using mominv::Poly;

namespace {

// Independent oracle: exact integral of a polynomial over [a, b].
double poly_integral(const Poly& p, double a, double b) {
    double acc = 0.0;
    for (int i = 0; i <= p.degree(); ++i)
        acc += p[i] * (std::pow(b, i + 1) - std::pow(a, i + 1)) / (i + 1);
    return acc;
}

// x^2 f''' + 3x f'' + (1 - 4x^2) f' - 4x f
DiffOperator bessel_like_op() {
    return DiffOperator({Poly({0, -4}), Poly({1, 0, -4}), Poly({0, 3}), Poly({0, 0, 1})});
}

Poly random_poly(std::mt19937& rng, int deg) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> c(static_cast<size_t>(deg) + 1);
    for (double& x : c) x = u(rng);
    if (std::abs(c.back()) < 0.25) c.back() = 0.5;
    return Poly(c);
}

DiffOperator random_op(std::mt19937& rng, int order, int coeff_deg) {
    std::vector<Poly> cs;
    for (int j = 0; j <= order; ++j) cs.push_back(random_poly(rng, coeff_deg));
    return DiffOperator(cs);
}

Jet poly_jet(const Poly& f, double x, int n) {
    Jet j;
    j.point = x;
    for (int s = 0; s < n; ++s) j.values.push_back(f.derivative(s).eval(x));
    return j;
}

}  // namespace

TEST_CASE("construction trims trailing zero coefficients") {
    const DiffOperator op({Poly({1.0}), Poly({0, 1}), Poly()});
    CHECK(op.order() == 1);
    CHECK(op.coeff(5).is_zero());
    CHECK(DiffOperator(std::vector<Poly>{}).is_zero());
}

TEST_CASE("application to polynomials") {
    const DiffOperator op = bessel_like_op();
    // f = x: (1 - 4x^2)*1 - 4x*x = 1 - 8x^2 (hand)
    const Poly r1 = mominv::apply_to_poly(op, Poly({0, 1}));
    REQUIRE(r1.degree() == 2);
    CHECK(r1[0] == doctest::Approx(1.0));
    CHECK(r1[1] == doctest::Approx(0.0));
    CHECK(r1[2] == doctest::Approx(-8.0));
    // f = x^2: 6x + 2x - 8x^3 - 4x^3 = 8x - 12x^3 (hand)
    const Poly r2 = mominv::apply_to_poly(op, Poly({0, 0, 1}));
    REQUIRE(r2.degree() == 3);
    CHECK(r2[1] == doctest::Approx(8.0));
    CHECK(r2[3] == doctest::Approx(-12.0));
}

TEST_CASE("left multiplication by a polynomial") {
    std::mt19937 rng(23u);
    for (int trial = 0; trial < 20; ++trial) {
        const DiffOperator op = random_op(rng, 1 + trial % 3, 2);
        const Poly q = random_poly(rng, 1 + trial % 3);
        const Poly f = random_poly(rng, 4);
        const Poly lhs = mominv::apply_to_poly(mominv::multiply_by_poly(op, q), f);
        const Poly rhs = q * mominv::apply_to_poly(op, f);
        REQUIRE(lhs.degree() == rhs.degree());
        for (int i = 0; i <= lhs.degree(); ++i)
            CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-11));
    }
}

TEST_CASE("adjoint on monomials") {
    // D = x d^2/dx^2: D*(x^2) = (x * x^2)'' = 6x
    const DiffOperator op({Poly(), Poly(), Poly({0, 1})});
    const Poly r = mominv::adjoint_on_monomial(op, 2);
    REQUIRE(r.degree() == 1);
    CHECK(r[1] == doctest::Approx(6.0));
    CHECK(r[0] == doctest::Approx(0.0));
}

TEST_CASE("first-order concomitant is u times p_1 x^k") {
    // D = d/dx - beta: P(u, x^k) = u(x) x^k
    const double beta = 0.7;
    const DiffOperator op({Poly::constant(-beta), Poly::constant(1.0)});
    Jet u;
    u.point = 1.0;
    u.values = {std::exp(beta)};
    CHECK(mominv::concomitant(op, u, 0) == doctest::Approx(std::exp(beta)));
    CHECK(mominv::concomitant(op, u, 3) == doctest::Approx(std::exp(beta)));
    u.point = 0.0;
    u.values = {1.0};
    CHECK(mominv::concomitant(op, u, 0) == doctest::Approx(1.0));  // 0^0 = 1
    CHECK(mominv::concomitant(op, u, 2) == doctest::Approx(0.0));
}

TEST_CASE("concomitant rejects short jets") {
    const DiffOperator op({Poly(), Poly(), Poly::constant(1.0)});  // order 2
    Jet u;
    u.point = 0.0;
    u.values = {1.0};  // needs two values
    CHECK_THROWS(mominv::concomitant(op, u, 0));
}

TEST_CASE("boundary sequence of a constant under d/dx") {
    // f = c on [0,1]: eps_k = c*1^k - c*0^k
    const DiffOperator op({Poly(), Poly::constant(1.0)});
    const double c = 2.5;
    Jet a{0.0, {c}}, b{1.0, {c}};
    const auto eps = mominv::boundary_sequence(op, a, b, 5);
    CHECK(eps[0] == doctest::Approx(0.0));
    for (int k = 1; k < 5; ++k) CHECK(eps[static_cast<size_t>(k)] == doctest::Approx(c));
}

TEST_CASE("boundary sequence of the exponential model") {
    // D = d/dx - beta, f = e^{beta x} on [0,1]: eps_0 = e^beta - 1, eps_k = e^beta
    const double beta = 0.7;
    const DiffOperator op({Poly::constant(-beta), Poly::constant(1.0)});
    Jet a{0.0, {1.0}}, b{1.0, {std::exp(beta)}};
    const auto eps = mominv::boundary_sequence(op, a, b, 6);
    CHECK(eps[0] == doctest::Approx(std::exp(beta) - 1.0));
    for (int k = 1; k < 6; ++k)
        CHECK(eps[static_cast<size_t>(k)] == doctest::Approx(std::exp(beta)));
}

TEST_CASE("integration by parts: moments of D f decompose exactly") {
    // For polynomial f: int (Df) x^k = int f * D*(x^k) + eps_k.
    std::mt19937 rng(29u);
    const double a = 0.3, b = 1.2;
    for (int trial = 0; trial < 30; ++trial) {
        const DiffOperator op = random_op(rng, 1 + trial % 3, 2);
        const Poly f = random_poly(rng, 4);
        const Jet ja = poly_jet(f, a, op.order());
        const Jet jb = poly_jet(f, b, op.order());
        const Poly df = mominv::apply_to_poly(op, f);
        for (int k = 0; k <= 10; ++k) {
            const double lhs = poly_integral(df * Poly::monomial(k), a, b);
            const double mid = poly_integral(f * mominv::adjoint_on_monomial(op, k), a, b);
            const double eps =
                mominv::concomitant(op, jb, k) - mominv::concomitant(op, ja, k);
            const double scale =
                std::max({std::abs(lhs), std::abs(mid), std::abs(eps), 1.0});
            CHECK(std::abs(lhs - mid - eps) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("boundary sequence has the geometric-times-polynomial form") {
    // D = d^2/dx^2 (p_2 = 1), f = 1 + 2x on [0.5, 2]:
    // eps_k = b^k q_b(k) - a^k q_a(k) with deg q <= 1. Fit the four unknown
    // polynomial coefficients on k = 0..3, then predict k = 4..8.
    const DiffOperator op({Poly(), Poly(), Poly::constant(1.0)});
    const Poly f({1.0, 2.0});
    const double a = 0.5, b = 2.0;
    const Jet ja = poly_jet(f, a, 2), jb = poly_jet(f, b, 2);
    const auto eps = mominv::boundary_sequence(op, ja, jb, 9);

    Eigen::MatrixXd M(4, 4);
    Eigen::VectorXd rhs(4);
    for (int k = 0; k < 4; ++k) {
        const double bk = std::pow(b, k), ak = std::pow(a, k);
        M(k, 0) = bk;
        M(k, 1) = bk * k;
        M(k, 2) = -ak;
        M(k, 3) = -ak * k;
        rhs(k) = eps[static_cast<size_t>(k)];
    }
    const Eigen::VectorXd q = M.fullPivLu().solve(rhs);
    for (int k = 4; k <= 8; ++k) {
        const double pred = std::pow(b, k) * (q(0) + q(1) * k) - std::pow(a, k) * (q(2) + q(3) * k);
        CHECK(pred == doctest::Approx(eps[static_cast<size_t>(k)]).epsilon(1e-9));
    }
    // the fitted boundary polynomials match the hand derivation:
    // q_b(k) = 2 - 2.5k, q_a(k) = 2 - 4k
    CHECK(q(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(q(1) == doctest::Approx(-2.5).epsilon(1e-9));
    CHECK(q(2) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(q(3) == doctest::Approx(-4.0).epsilon(1e-9));
}
