#include "mominv/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mominv/poly.hpp"

namespace mominv {

namespace {

// Dormand-Prince 4(5) tableau
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order weights equal the last A row (FSAL); 4th-order embedded weights:
constexpr double kB4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

using State = std::vector<double>;

void check_leading_coeff(const Poly& pn, double a, double b) {
    const double scale = std::max(pn.max_abs_coeff(), 1e-300);
    const double pi = std::acos(-1.0);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < 256; ++i) {
        const double x = mid + half * std::cos(pi * i / 255.0);
        if (std::abs(pn.eval(x)) < 1e-12 * scale)
            throw std::domain_error("solve_ivp: leading coefficient vanishes near x=" +
                                    std::to_string(x));
    }
    if (pn.degree() >= 1) {
        for (const auto& r : roots(pn)) {
            if (std::abs(r.imag()) < 1e-9 && r.real() >= a - 1e-12 && r.real() <= b + 1e-12)
                throw std::domain_error(
                    "solve_ivp: leading coefficient has a root inside the interval at x=" +
                    std::to_string(r.real()));
        }
    }
}

}  // namespace

double IvpSolution::interp(double x) const {
    if (grid.size() < 2) throw std::domain_error("interp: empty solution");
    const double a = grid.front(), b = grid.back();
    if (x < a - 1e-12 || x > b + 1e-12) throw std::out_of_range("interp: outside the grid");
    x = std::clamp(x, a, b);
    const double h = grid[1] - grid[0];
    size_t i = std::min(static_cast<size_t>(std::max(0.0, (x - a) / h)), grid.size() - 2);
    const double t = (x - grid[i]) / h;
    const double y0 = values[i], y1 = values[i + 1];
    const double d0 = derivatives[0][i] * h, d1 = derivatives[0][i + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
}

IvpSolution solve_ivp(const DiffOperator& op, double a, double b, const Jet& init,
                      int n_out, double rtol, double atol) {
    if (op.is_zero() || op.order() < 1)
        throw std::invalid_argument("solve_ivp: operator must have order >= 1");
    if (!(a < b)) throw std::invalid_argument("solve_ivp: requires a < b");
    if (n_out < 2) throw std::invalid_argument("solve_ivp: need at least two output points");
    if (std::abs(init.point - a) > 1e-12 * std::max(1.0, std::abs(a)))
        throw std::invalid_argument("solve_ivp: initial jet not at the left endpoint");
    const int n = op.order();
    if (static_cast<int>(init.values.size()) != n)
        throw std::invalid_argument("solve_ivp: jet length must equal the operator order");
    check_leading_coeff(op.coeff(n), a, b);

    auto rhs = [&](double x, const State& y, State& dy) {
        for (int i = 0; i + 1 < n; ++i) dy[static_cast<size_t>(i)] = y[static_cast<size_t>(i) + 1];
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += op.coeff(j).eval(x) * y[static_cast<size_t>(j)];
        dy[static_cast<size_t>(n) - 1] = -acc / op.coeff(n).eval(x);
    };

    IvpSolution sol;
    sol.grid.resize(static_cast<size_t>(n_out));
    for (int i = 0; i < n_out; ++i)
        sol.grid[static_cast<size_t>(i)] = a + (b - a) * i / (n_out - 1);
    sol.values.resize(static_cast<size_t>(n_out));
    sol.derivatives.assign(static_cast<size_t>(std::max(n - 1, 1)),
                           std::vector<double>(static_cast<size_t>(n_out)));

    State y(init.values.begin(), init.values.end());
    State dy(static_cast<size_t>(n)), k[7], ytmp(static_cast<size_t>(n)), y5(static_cast<size_t>(n)),
        y4(static_cast<size_t>(n));
    for (auto& ki : k) ki.resize(static_cast<size_t>(n));

    auto record = [&](int idx, const State& st) {
        sol.values[static_cast<size_t>(idx)] = st[0];
        for (int s = 1; s < n; ++s)
            sol.derivatives[static_cast<size_t>(s - 1)][static_cast<size_t>(idx)] =
                st[static_cast<size_t>(s)];
        if (n == 1) {
            rhs(sol.grid[static_cast<size_t>(idx)], st, dy);
            sol.derivatives[0][static_cast<size_t>(idx)] = dy[0];
        }
    };
    record(0, y);

    double x = a;
    double h = (b - a) / 1000.0;
    int next = 1;
    rhs(x, y, k[0]);  // FSAL seed
    while (next < n_out) {
        const double target = sol.grid[static_cast<size_t>(next)];
        bool hit = false;
        if (x + h >= target - 1e-14 * (b - a)) {
            h = target - x;
            hit = true;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), 1.0))
            throw std::runtime_error("solve_ivp: step size underflow at x=" + std::to_string(x));

        for (int s = 1; s < 7; ++s) {
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int q = 0; q < s; ++q) acc += kA[s][q] * k[q][static_cast<size_t>(i)];
                ytmp[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] + h * acc;
            }
            rhs(x + kC[s] * h, ytmp, k[s]);
        }
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc5 = 0.0, acc4 = 0.0;
            for (int q = 0; q < 7; ++q) {
                const double kq = k[q][static_cast<size_t>(i)];
                if (q < 6) acc5 += kA[6][q] * kq;
                acc4 += kB4[q] * kq;
            }
            y5[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] + h * acc5;
            y4[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] + h * acc4;
            const double sc =
                atol + rtol * std::max(std::abs(y[static_cast<size_t>(i)]),
                                       std::abs(y5[static_cast<size_t>(i)]));
            const double e = (y5[static_cast<size_t>(i)] - y4[static_cast<size_t>(i)]) / sc;
            err += e * e;
        }
        err = std::sqrt(err / n);

        if (err <= 1.0) {
            x += h;
            y = y5;
            k[0] = k[6];  // FSAL: last stage evaluated at (x+h, y5)
            if (hit) {
                record(next, y);
                ++next;
            }
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h = std::min(h * fac, b - a);
        if (h <= 0.0) h = 1e-14 * (b - a);
    }
    return sol;
}

}  // namespace mominv
