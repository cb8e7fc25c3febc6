#include "mominv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mominv/ivp.hpp"

namespace mominv {

namespace {

void check_rational_piece(const RationalPiece& rp, double lo, double hi) {
    if (rp.den.is_zero()) throw std::invalid_argument("rational piece: zero denominator");
    if (rp.den.degree() >= 1) {
        for (const auto& r : roots(rp.den))
            if (std::abs(r.imag()) < 1e-9 && r.real() >= lo - 1e-12 && r.real() <= hi + 1e-12)
                throw std::invalid_argument(
                    "rational piece: denominator vanishes inside the piece at x=" +
                    std::to_string(r.real()));
    }
}

// I_k = int_s^t x^k e^{beta x} dx for k = 0..K, by the downward recursion
// I_{k-1} = (t^k e^{beta t} - s^k e^{beta s} - beta I_k) / k, which damps any
// seed error superexponentially and stays regular as beta -> 0.
std::vector<double> exp_moments(double beta, double s, double t, int K) {
    const int M = K + 30 + static_cast<int>(std::ceil(std::abs(beta)));
    const double es = std::exp(beta * s), et = std::exp(beta * t);
    double ik = 0.0;  // seed I_M = 0
    std::vector<double> out(static_cast<size_t>(K) + 1, 0.0);
    for (int k = M; k >= 1; --k) {
        const double ikm1 = (std::pow(t, k) * et - std::pow(s, k) * es - beta * ik) / k;
        if (k - 1 <= K) out[static_cast<size_t>(k - 1)] = ikm1;
        ik = ikm1;
    }
    return out;
}

// S_k = int_s^t x^k sin(w x) dx and C_k likewise with cos, via the coupled
// downward recursion C_{k-1} = (w S_k + [x^k cos(w x)]_s^t) / k,
// S_{k-1} = ([x^k sin(w x)]_s^t - w C_k) / k; regular as w -> 0.
void trig_moments(double w, double s, double t, int K, std::vector<double>& S,
                  std::vector<double>& C) {
    const int M = K + 30 + 2 * static_cast<int>(std::ceil(std::abs(w)));
    const double sins = std::sin(w * s), sint = std::sin(w * t);
    const double coss = std::cos(w * s), cost = std::cos(w * t);
    S.assign(static_cast<size_t>(K) + 1, 0.0);
    C.assign(static_cast<size_t>(K) + 1, 0.0);
    double sk = 0.0, ck = 0.0;  // seeds S_M = C_M = 0
    for (int k = M; k >= 1; --k) {
        const double tk = std::pow(t, k), skp = std::pow(s, k);
        const double ckm1 = (w * sk + tk * cost - skp * coss) / k;
        const double skm1 = (tk * sint - skp * sins - w * ck) / k;
        if (k - 1 <= K) {
            S[static_cast<size_t>(k - 1)] = skm1;
            C[static_cast<size_t>(k - 1)] = ckm1;
        }
        sk = skm1;
        ck = ckm1;
    }
}

// exact piece moments on [lo, hi] appended into acc[k]
void accumulate_piece_moments(const PieceModel& piece, double lo, double hi, int K,
                              std::vector<double>& acc) {
    if (const auto* pp = std::get_if<PolynomialPiece>(&piece)) {
        for (int k = 0; k <= K; ++k) {
            const Poly g = pp->poly * Poly::monomial(k);
            double v = 0.0;
            for (int i = 0; i <= g.degree(); ++i)
                v += g[i] * (std::pow(hi, i + 1) - std::pow(lo, i + 1)) / (i + 1);
            acc[static_cast<size_t>(k)] += v;
        }
    } else if (const auto* sp = std::get_if<SinusoidPiece>(&piece)) {
        std::vector<double> S, C;
        trig_moments(sp->omega, lo, hi, K, S, C);
        const double cs = sp->amplitude * std::cos(sp->phase);
        const double sn = sp->amplitude * std::sin(sp->phase);
        for (int k = 0; k <= K; ++k)
            acc[static_cast<size_t>(k)] += cs * S[static_cast<size_t>(k)] + sn * C[static_cast<size_t>(k)];
    } else if (const auto* ep = std::get_if<ExponentialPiece>(&piece)) {
        const auto I = exp_moments(ep->beta, lo, hi, K);
        for (int k = 0; k <= K; ++k) acc[static_cast<size_t>(k)] += ep->alpha * I[static_cast<size_t>(k)];
    } else {
        throw std::invalid_argument("moments_exact: no closed form; use quadrature");
    }
}

}  // namespace

void PiecewiseSignal::validate() const {
    if (!(a < b)) throw std::invalid_argument("signal: requires a < b");
    if (pieces.size() != breakpoints.size() + 1)
        throw std::invalid_argument("signal: need one more piece than breakpoints");
    double prev = a;
    for (double xi : breakpoints) {
        if (!(xi > prev && xi < b))
            throw std::invalid_argument("signal: breakpoints must increase strictly inside (a, b)");
        prev = xi;
    }
    const auto es = edges();
    for (size_t n = 0; n < pieces.size(); ++n) {
        if (const auto* rp = std::get_if<RationalPiece>(&pieces[n]))
            check_rational_piece(*rp, es[n], es[n + 1]);
        if (const auto* op = std::get_if<OdePiece>(&pieces[n])) {
            if (op->op.order() < 1 ||
                static_cast<int>(op->init.size()) != op->op.order())
                throw std::invalid_argument("signal: ode piece init length must equal the order");
        }
    }
}

std::vector<double> PiecewiseSignal::edges() const {
    std::vector<double> e;
    e.reserve(breakpoints.size() + 2);
    e.push_back(a);
    e.insert(e.end(), breakpoints.begin(), breakpoints.end());
    e.push_back(b);
    return e;
}

size_t PiecewiseSignal::piece_index(double x) const {
    return static_cast<size_t>(
        std::upper_bound(breakpoints.begin(), breakpoints.end(), x) - breakpoints.begin());
}

double eval_at(const PiecewiseSignal& f, double x) {
    const PieceModel& piece = f.pieces[f.piece_index(x)];
    if (const auto* pp = std::get_if<PolynomialPiece>(&piece)) return pp->poly.eval(x);
    if (const auto* sp = std::get_if<SinusoidPiece>(&piece))
        return sp->amplitude * std::sin(sp->omega * x + sp->phase);
    if (const auto* ep = std::get_if<ExponentialPiece>(&piece))
        return ep->alpha * std::exp(ep->beta * x);
    if (const auto* rp = std::get_if<RationalPiece>(&piece))
        return rp->num.eval(x) / rp->den.eval(x);
    throw std::invalid_argument("eval_at: ode pieces have no closed form");
}

SampledSignal sample(const PiecewiseSignal& f, int n) {
    f.validate();
    if (n < 2) throw std::invalid_argument("sample: need at least two grid points");
    SampledSignal s;
    s.a = f.a;
    s.b = f.b;
    s.values.resize(static_cast<size_t>(n));

    // closed-form pieces pointwise; ode pieces once per piece, then interpolate
    const auto es = f.edges();
    std::vector<IvpSolution> ode_solutions(f.pieces.size());
    std::vector<bool> is_ode(f.pieces.size(), false);
    for (size_t p = 0; p < f.pieces.size(); ++p) {
        if (const auto* op = std::get_if<OdePiece>(&f.pieces[p])) {
            Jet j;
            j.point = es[p];
            j.values = op->init;
            ode_solutions[p] = solve_ivp(op->op, es[p], es[p + 1], j, 2049);
            is_ode[p] = true;
        }
    }
    for (int i = 0; i < n; ++i) {
        const double x = s.x(static_cast<size_t>(i));
        const size_t p = f.piece_index(x);
        s.values[static_cast<size_t>(i)] =
            is_ode[p] ? ode_solutions[p].interp(x) : eval_at(f, x);
    }
    return s;
}

SampledSignal add_noise(const SampledSignal& s, double snr_db, std::uint64_t seed) {
    double power = 0.0;
    for (double v : s.values) power += v * v;
    power /= static_cast<double>(s.values.size());
    if (power == 0.0) throw std::invalid_argument("add_noise: zero signal has no SNR");
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

    // Box-Muller over 53-bit uniforms from mt19937_64: portable bit-for-bit
    std::mt19937_64 rng(seed);
    auto u01 = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    };
    SampledSignal out = s;
    const double two_pi = 2.0 * std::acos(-1.0);
    double cached = 0.0;
    bool have_cached = false;
    for (double& v : out.values) {
        double z;
        if (have_cached) {
            z = cached;
            have_cached = false;
        } else {
            const double r = std::sqrt(-2.0 * std::log(u01()));
            const double th = two_pi * u01();
            z = r * std::cos(th);
            cached = r * std::sin(th);
            have_cached = true;
        }
        v += sigma * z;
    }
    return out;
}

MomentSequence moments_quadrature(const SampledSignal& s, int K) {
    if (K < 0) throw std::invalid_argument("moments_quadrature: negative K");
    if (s.values.size() < 2) throw std::invalid_argument("moments_quadrature: need samples");
    MomentSequence m;
    m.a = s.a;
    m.b = s.b;
    m.values.assign(static_cast<size_t>(K) + 1, 0.0);
    const double h = (s.b - s.a) / static_cast<double>(s.values.size() - 1);
    for (size_t i = 0; i < s.values.size(); ++i) {
        const double w = (i == 0 || i + 1 == s.values.size()) ? 0.5 : 1.0;
        const double x = s.x(i);
        double p = w * s.values[i];
        for (int k = 0; k <= K; ++k) {
            m.values[static_cast<size_t>(k)] += p;
            p *= x;
        }
    }
    for (double& v : m.values) v *= h;
    return m;
}

MomentSequence moments_exact(const PiecewiseSignal& f, int K) {
    f.validate();
    if (K < 0) throw std::invalid_argument("moments_exact: negative K");
    MomentSequence m;
    m.a = f.a;
    m.b = f.b;
    m.values.assign(static_cast<size_t>(K) + 1, 0.0);
    const auto es = f.edges();
    for (size_t p = 0; p < f.pieces.size(); ++p)
        accumulate_piece_moments(f.pieces[p], es[p], es[p + 1], K, m.values);
    return m;
}

double mse(const SampledSignal& x, const SampledSignal& y) {
    if (x.values.size() != y.values.size() || x.a != y.a || x.b != y.b)
        throw std::invalid_argument("mse: grids differ");
    double acc = 0.0;
    for (size_t i = 0; i < x.values.size(); ++i) {
        const double d = x.values[i] - y.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(x.values.size());
}

}  // namespace mominv
