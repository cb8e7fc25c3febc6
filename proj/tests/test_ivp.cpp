#include <doctest.h>

#include <cmath>
#include <vector>

#include "mominv/ivp.hpp"
#include "mominv/poly.hpp"

using mominv::DiffOperator;
using mominv::IvpSolution;
using mominv::Jet;
using mominv::Poly;

TEST_CASE("exponential growth: u' - u = 0") {
    const DiffOperator op({Poly::constant(-1.0), Poly::constant(1.0)});
    const IvpSolution sol = mominv::solve_ivp(op, 0.0, 1.0, Jet{0.0, {1.0}}, 101);
    REQUIRE(sol.grid.size() == 101);
    CHECK(sol.grid.front() == doctest::Approx(0.0));
    CHECK(sol.grid.back() == doctest::Approx(1.0));
    for (size_t i = 0; i < sol.grid.size(); ++i)
        CHECK(std::abs(sol.values[i] - std::exp(sol.grid[i])) <= 1e-9);
    // first-derivative row recovered from the ODE: u' = u
    REQUIRE(sol.derivatives.size() == 1);
    for (size_t i = 0; i < sol.grid.size(); ++i)
        CHECK(sol.derivatives[0][i] == doctest::Approx(sol.values[i]).epsilon(1e-9));
}

TEST_CASE("harmonic oscillator: u'' + 4u = 0") {
    const DiffOperator op({Poly::constant(4.0), Poly(), Poly::constant(1.0)});
    const double b = std::acos(-1.0) / 2.0;
    const IvpSolution sol = mominv::solve_ivp(op, 0.0, b, Jet{0.0, {0.0, 2.0}}, 257);
    for (size_t i = 0; i < sol.grid.size(); ++i) {
        CHECK(std::abs(sol.values[i] - std::sin(2.0 * sol.grid[i])) <= 1e-8);
        CHECK(std::abs(sol.derivatives[0][i] - 2.0 * std::cos(2.0 * sol.grid[i])) <= 1e-7);
    }
}

TEST_CASE("vanishing leading coefficient is rejected") {
    // x u' - u = 0 on [-1, 1]: p_1 = x vanishes inside
    const DiffOperator op({Poly::constant(-1.0), Poly({0.0, 1.0})});
    CHECK_THROWS(mominv::solve_ivp(op, -1.0, 1.0, Jet{-1.0, {1.0}}, 11));
    // fine on an interval where p_1 stays away from zero
    const IvpSolution sol = mominv::solve_ivp(op, 1.0, 2.0, Jet{1.0, {1.0}}, 11);
    for (size_t i = 0; i < sol.grid.size(); ++i)
        CHECK(sol.values[i] == doctest::Approx(sol.grid[i]).epsilon(1e-9));  // u = x
}

TEST_CASE("initial point must match the interval") {
    const DiffOperator op({Poly::constant(-1.0), Poly::constant(1.0)});
    CHECK_THROWS(mominv::solve_ivp(op, 0.0, 1.0, Jet{0.5, {1.0}}, 11));
    CHECK_THROWS(mominv::solve_ivp(op, 0.0, 1.0, Jet{0.0, {1.0, 0.0}}, 11));  // jet too long
    CHECK_THROWS(mominv::solve_ivp(op, 0.0, 1.0, Jet{0.0, {1.0}}, 1));        // n_out < 2
}

TEST_CASE("tightening tolerances does not hurt accuracy") {
    const DiffOperator op({Poly::constant(-1.0), Poly::constant(1.0)});
    double prev = 1.0;
    for (double rtol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        const IvpSolution sol =
            mominv::solve_ivp(op, 0.0, 1.0, Jet{0.0, {1.0}}, 33, rtol, rtol * 1e-2);
        double err = 0.0;
        for (size_t i = 0; i < sol.grid.size(); ++i)
            err = std::max(err, std::abs(sol.values[i] - std::exp(sol.grid[i])));
        CHECK(err <= prev * 1.2 + 5e-15);
        prev = err;
    }
    CHECK(prev <= 1e-10);
}

TEST_CASE("rational functions solve their first-order model equation") {
    // f = p/q obeys (-pq) f' + (p'q - pq') f = 0; here f = (1+x)/(x+2).
    const Poly p({1.0, 1.0}), q({2.0, 1.0});
    const Poly c1 = -1.0 * (p * q);
    const Poly c0 = p.derivative() * q - p * q.derivative();
    const DiffOperator op({c0, c1});
    const IvpSolution sol =
        mominv::solve_ivp(op, 0.0, 1.0, Jet{0.0, {p.eval(0.0) / q.eval(0.0)}}, 101);
    for (size_t i = 0; i < sol.grid.size(); ++i) {
        const double x = sol.grid[i];
        CHECK(sol.values[i] == doctest::Approx(p.eval(x) / q.eval(x)).epsilon(1e-8));
    }
}

TEST_CASE("Hermite interpolation between grid points") {
    const DiffOperator op({Poly::constant(-1.0), Poly::constant(1.0)});
    const IvpSolution sol = mominv::solve_ivp(op, 0.0, 1.0, Jet{0.0, {1.0}}, 65);
    for (double x : {0.013, 0.27, 0.5001, 0.93, 1.0, 0.0})
        CHECK(sol.interp(x) == doctest::Approx(std::exp(x)).epsilon(1e-7));
}
