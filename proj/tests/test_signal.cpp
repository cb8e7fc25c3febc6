#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mominv/poly.hpp"
#include "mominv/signal.hpp"
#include "mominv/signal_io.hpp"

using mominv::MomentSequence;
using mominv::PiecewiseSignal;
using mominv::Poly;
using mominv::SampledSignal;

namespace {

PiecewiseSignal pw_constant(std::vector<double> jumps, std::vector<double> vals,
                            double a = 0.0, double b = 1.0) {
    PiecewiseSignal f;
    f.a = a;
    f.b = b;
    f.breakpoints = std::move(jumps);
    for (double v : vals) f.pieces.push_back(mominv::PolynomialPiece{Poly::constant(v)});
    return f;
}

// Independent oracle: composite Simpson on a very fine grid.
template <typename F>
double simpson(F&& fn, double a, double b, int n /*even*/) {
    const double h = (b - a) / n;
    double acc = fn(a) + fn(b);
    for (int i = 1; i < n; ++i) acc += fn(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Independent oracle: moments of e^{beta x} on [0,1] via long-double series.
double exp_moment_series(double beta, int k) {
    long double term = 1.0L, acc = 0.0L;
    for (int n = 0; n < 200; ++n) {
        acc += term / static_cast<long double>(k + n + 1);
        term *= static_cast<long double>(beta) / static_cast<long double>(n + 1);
    }
    return static_cast<double>(acc);
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("sampling is right-continuous at breakpoints") {
    const PiecewiseSignal f = pw_constant({0.5}, {1.0, -2.0});
    const SampledSignal s = mominv::sample(f, 5);
    REQUIRE(s.values.size() == 5);
    CHECK(s.values[0] == doctest::Approx(1.0));
    CHECK(s.values[1] == doctest::Approx(1.0));
    CHECK(s.values[2] == doctest::Approx(-2.0));  // x = 0.5 takes the right piece
    CHECK(s.values[3] == doctest::Approx(-2.0));
    CHECK(s.values[4] == doctest::Approx(-2.0));
}

TEST_CASE("closed-form piece evaluation") {
    PiecewiseSignal f;
    f.a = 0.0;
    f.b = 1.0;
    f.breakpoints = {0.3, 0.6};
    f.pieces = {mominv::SinusoidPiece{2.0, 5.0, 0.25},
                mominv::ExponentialPiece{1.5, 0.7},
                mominv::RationalPiece{Poly({1.0, 1.0}), Poly({2.0, 1.0})}};
    CHECK(mominv::eval_at(f, 0.1) == doctest::Approx(2.0 * std::sin(0.5 + 0.25)));
    CHECK(mominv::eval_at(f, 0.5) == doctest::Approx(1.5 * std::exp(0.35)));
    CHECK(mominv::eval_at(f, 0.8) == doctest::Approx(1.8 / 2.8));
}

TEST_CASE("model validation rejects malformed signals") {
    PiecewiseSignal f = pw_constant({0.5, 0.4}, {1.0, 2.0, 3.0});
    CHECK_THROWS(f.validate());  // breakpoints out of order
    PiecewiseSignal g = pw_constant({0.5}, {1.0});
    CHECK_THROWS(g.validate());  // piece count mismatch
    PiecewiseSignal r;
    r.a = 0.0;
    r.b = 1.0;
    r.pieces = {mominv::RationalPiece{Poly({1.0}), Poly({-0.5, 1.0})}};
    CHECK_THROWS(r.validate());  // denominator root at 0.5
}

TEST_CASE("exact moments of a piecewise constant") {
    const PiecewiseSignal f = pw_constant({0.25, 0.5, 0.8}, {1.0, -2.0, 3.0, 0.5});
    const MomentSequence m = mominv::moments_exact(f, 10);
    CHECK(m.values[0] == doctest::Approx(0.75));  // 0.25 - 0.5 + 0.9 + 0.1, by hand
    // all k against the direct endpoint-difference formula
    const std::vector<double> edges = {0.0, 0.25, 0.5, 0.8, 1.0};
    const std::vector<double> vals = {1.0, -2.0, 3.0, 0.5};
    for (int k = 0; k <= 10; ++k) {
        double expect = 0.0;
        for (size_t n = 0; n < vals.size(); ++n)
            expect += vals[n] * (std::pow(edges[n + 1], k + 1) - std::pow(edges[n], k + 1)) /
                      (k + 1);
        CHECK(m.values[static_cast<size_t>(k)] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("exact moments of polynomials use the power rule") {
    PiecewiseSignal f;
    f.pieces = {mominv::PolynomialPiece{Poly({1.0, -2.0, 0.0, 3.0})}};
    const MomentSequence m = mominv::moments_exact(f, 8);
    for (int k = 0; k <= 8; ++k) {
        const double expect = 1.0 / (k + 1) - 2.0 / (k + 2) + 3.0 / (k + 4);
        CHECK(m.values[static_cast<size_t>(k)] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("exact exponential moments match the series oracle") {
    PiecewiseSignal f;
    f.pieces = {mominv::ExponentialPiece{1.5, 0.7}};
    const MomentSequence m = mominv::moments_exact(f, 16);
    for (int k = 0; k <= 16; ++k)
        CHECK(m.values[static_cast<size_t>(k)] ==
              doctest::Approx(1.5 * exp_moment_series(0.7, k)).epsilon(1e-13));
    // k = 0 closed form: alpha (e^beta - 1)/beta
    CHECK(m.values[0] == doctest::Approx(1.5 * (std::exp(0.7) - 1.0) / 0.7));
    // steep decay still fine
    PiecewiseSignal g;
    g.pieces = {mominv::ExponentialPiece{1.0, -4.0}};
    const MomentSequence mg = mominv::moments_exact(g, 12);
    for (int k = 0; k <= 12; ++k)
        CHECK(mg.values[static_cast<size_t>(k)] ==
              doctest::Approx(exp_moment_series(-4.0, k)).epsilon(1e-12));
}

TEST_CASE("exact sinusoid moments match hand integrals and Simpson") {
    PiecewiseSignal f;
    f.pieces = {mominv::SinusoidPiece{1.0, 2.0, 0.0}};  // sin(2x) on [0,1]
    const MomentSequence m = mominv::moments_exact(f, 12);
    CHECK(m.values[0] == doctest::Approx((1.0 - std::cos(2.0)) / 2.0).epsilon(1e-14));
    CHECK(m.values[1] ==
          doctest::Approx(-std::cos(2.0) / 2.0 + std::sin(2.0) / 4.0).epsilon(1e-13));
    for (int k = 0; k <= 12; ++k) {
        const double oracle =
            simpson([k](double x) { return std::pow(x, k) * std::sin(2.0 * x); }, 0.0, 1.0,
                    20000);
        CHECK(m.values[static_cast<size_t>(k)] == doctest::Approx(oracle).epsilon(1e-11));
    }
    // amplitude & phase enter linearly: A sin(wx + p) on [-1, 1], w < 1
    PiecewiseSignal g;
    g.a = -1.0;
    g.b = 1.0;
    g.pieces = {mominv::SinusoidPiece{0.8, 0.3, 1.1}};
    const MomentSequence mg = mominv::moments_exact(g, 10);
    for (int k = 0; k <= 10; ++k) {
        const double oracle = simpson(
            [k](double x) { return 0.8 * std::pow(x, k) * std::sin(0.3 * x + 1.1); }, -1.0,
            1.0, 20000);
        CHECK(mg.values[static_cast<size_t>(k)] ==
              doctest::Approx(oracle).epsilon(1e-11).scale(1.0));
    }
}

TEST_CASE("moments are additive across pieces") {
    // splitting a smooth signal at an artificial breakpoint changes nothing
    PiecewiseSignal whole;
    whole.pieces = {mominv::ExponentialPiece{1.5, 0.7}};
    PiecewiseSignal split;
    split.breakpoints = {0.37};
    split.pieces = {mominv::ExponentialPiece{1.5, 0.7}, mominv::ExponentialPiece{1.5, 0.7}};
    const MomentSequence mw = mominv::moments_exact(whole, 12);
    const MomentSequence ms = mominv::moments_exact(split, 12);
    for (int k = 0; k <= 12; ++k)
        CHECK(ms.values[static_cast<size_t>(k)] ==
              doctest::Approx(mw.values[static_cast<size_t>(k)]).epsilon(1e-13));
    // and both agree with whole-interval quadrature at O(h^2)
    const MomentSequence mq = mominv::moments_quadrature(mominv::sample(whole, 8193), 12);
    for (int k = 0; k <= 12; ++k)
        CHECK(mq.values[static_cast<size_t>(k)] ==
              doctest::Approx(mw.values[static_cast<size_t>(k)]).epsilon(1e-6));
}

TEST_CASE("rational and ode pieces have no closed-form moments") {
    PiecewiseSignal f;
    f.pieces = {mominv::RationalPiece{Poly({1.0}), Poly({2.0, 1.0})}};
    CHECK_THROWS_WITH_AS(mominv::moments_exact(f, 3),
                         "moments_exact: no closed form; use quadrature",
                         std::invalid_argument);
}

TEST_CASE("quadrature moments of the constant signal") {
    const PiecewiseSignal f = pw_constant({}, {1.0});
    const MomentSequence m = mominv::moments_quadrature(mominv::sample(f, 4096), 8);
    for (int k = 0; k <= 8; ++k)
        CHECK(m.values[static_cast<size_t>(k)] == doctest::Approx(1.0 / (k + 1)).epsilon(1e-6));
}

TEST_CASE("trapezoid error decays at second order on smooth pieces") {
    PiecewiseSignal f;
    f.pieces = {mominv::SinusoidPiece{1.3, 4.0, 0.4}};
    const MomentSequence exact = mominv::moments_exact(f, 6);
    auto max_err = [&](int n) {
        const MomentSequence q = mominv::moments_quadrature(mominv::sample(f, n), 6);
        double e = 0.0;
        for (int k = 0; k <= 6; ++k)
            e = std::max(e, std::abs(q.values[static_cast<size_t>(k)] -
                                     exact.values[static_cast<size_t>(k)]));
        return e;
    };
    const double e1 = max_err(513), e2 = max_err(1025), e3 = max_err(2049);
    const double order12 = std::log2(e1 / e2), order23 = std::log2(e2 / e3);
    CHECK(order12 >= 1.8);
    CHECK(order12 <= 2.2);
    CHECK(order23 >= 1.8);
    CHECK(order23 <= 2.2);
}

TEST_CASE("ode pieces sample through the integrator") {
    PiecewiseSignal f;
    f.pieces = {mominv::OdePiece{
        mominv::DiffOperator({Poly::constant(-0.7), Poly::constant(1.0)}), {1.5}}};
    const SampledSignal s = mominv::sample(f, 257);
    for (size_t i = 0; i < s.size(); ++i)
        CHECK(s.values[i] == doctest::Approx(1.5 * std::exp(0.7 * s.x(i))).epsilon(1e-7));
}

TEST_CASE("noise is reproducible and hits the requested SNR") {
    const PiecewiseSignal f = pw_constant({}, {1.0});
    const SampledSignal clean = mominv::sample(f, 100000);
    const SampledSignal n1 = mominv::add_noise(clean, 20.0, 42);
    const SampledSignal n2 = mominv::add_noise(clean, 20.0, 42);
    const SampledSignal n3 = mominv::add_noise(clean, 20.0, 43);
    CHECK(n1.values == n2.values);  // bitwise
    CHECK(n1.values != n3.values);
    double sig = 0.0, noise = 0.0;
    for (size_t i = 0; i < clean.size(); ++i) {
        sig += clean.values[i] * clean.values[i];
        const double d = n1.values[i] - clean.values[i];
        noise += d * d;
    }
    const double snr_emp = 10.0 * std::log10(sig / noise);
    CHECK(std::abs(snr_emp - 20.0) <= 0.5);
    CHECK_THROWS(mominv::add_noise(mominv::sample(pw_constant({}, {0.0}), 16), 20.0, 1));
}

TEST_CASE("mse") {
    SampledSignal x, y;
    x.values = {1.0, 2.0, 3.0};
    y.values = {1.0, 2.5, 3.0};
    CHECK(mominv::mse(x, x) == 0.0);
    CHECK(mominv::mse(x, y) == doctest::Approx(0.25 / 3.0));
    SampledSignal z;
    z.values = {1.0, 2.0};
    CHECK_THROWS(mominv::mse(x, z));
}

TEST_CASE("model JSON round trip") {
    PiecewiseSignal f;
    f.a = -1.0;
    f.b = 1.5;
    f.breakpoints = {0.25, 0.7};
    f.pieces = {mominv::SinusoidPiece{1.0, 5.0, 0.0},
                mominv::RationalPiece{Poly({1.0, 1.0}), Poly({3.0, 1.0})},
                mominv::OdePiece{
                    mominv::DiffOperator({Poly::constant(-0.5), Poly::constant(1.0)}), {2.0}}};
    const std::string text = mominv::signal_to_json(f);
    const PiecewiseSignal g = mominv::signal_from_json(text);
    CHECK(g.a == f.a);
    CHECK(g.b == f.b);
    CHECK(g.breakpoints == f.breakpoints);
    REQUIRE(g.pieces.size() == 3);
    CHECK(mominv::signal_to_json(g) == text);  // stable second pass
    CHECK_THROWS(mominv::signal_from_json("{not json"));
    CHECK_THROWS(mominv::signal_from_json("{\"interval\":[0,1],\"pieces\":[{\"kind\":\"mystery\"}]}"));
}

TEST_CASE("moments CSV round trip") {
    const std::string path = temp_path("mominv_test_moments.csv");
    MomentSequence m;
    m.a = 0.0;
    m.b = 1.0;
    m.values = {0.75, 1.0 / 3.0, 0.2071067811865476};
    mominv::save_moments_csv(path, m);
    const MomentSequence r = mominv::load_moments_csv(path, 0.0, 1.0);
    CHECK(r.values == m.values);  // bitwise through the text format
    std::remove(path.c_str());
    CHECK_THROWS(mominv::load_moments_csv(path, 0.0, 1.0));
}

TEST_CASE("samples CSV round trip") {
    const std::string path = temp_path("mominv_test_samples.csv");
    const SampledSignal s = mominv::sample(pw_constant({0.5}, {1.0, -2.0}), 33);
    mominv::save_samples_csv(path, s);
    const SampledSignal r = mominv::load_samples_csv(path);
    CHECK(r.a == s.a);
    CHECK(r.b == s.b);
    CHECK(r.values == s.values);
    std::remove(path.c_str());
}
