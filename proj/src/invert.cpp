#include "mominv/invert.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <stdexcept>

#include "mominv/ivp.hpp"
#include "mominv/rootfind.hpp"

namespace mominv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 64-point Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on the
// three-term recurrence. Computed once.
struct GlRule {
    std::array<double, 64> x{}, w{};
};

const GlRule& gl64() {
    static const GlRule rule = [] {
        GlRule g{};
        const int n = 64;
        const double pi = std::acos(-1.0);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double deriv = 0.0;
            for (int it = 0; it < 60; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
                }
                deriv = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / deriv;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            g.x[static_cast<size_t>(i)] = -x;
            g.x[static_cast<size_t>(n - 1 - i)] = x;
            const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            g.w[static_cast<size_t>(i)] = w;
            g.w[static_cast<size_t>(n - 1 - i)] = w;
        }
        return g;
    }();
    return rule;
}

// integral of x^k u(x) over [s, t], two Gauss panels
double moment_integral(const std::function<double(double)>& u, int k, double s, double t) {
    const GlRule& g = gl64();
    const double mid = 0.5 * (s + t);
    double total = 0.0;
    const double lo[2] = {s, mid}, hi[2] = {mid, t};
    for (int panel = 0; panel < 2; ++panel) {
        const double half = 0.5 * (hi[panel] - lo[panel]);
        const double center = 0.5 * (hi[panel] + lo[panel]);
        double acc = 0.0;
        for (size_t i = 0; i < g.x.size(); ++i) {
            const double x = center + half * g.x[i];
            acc += g.w[i] * std::pow(x, k) * u(x);
        }
        total += half * acc;
    }
    return total;
}

DiffOperator operator_from(const StripeSpec& spec, const std::vector<double>& coeffs) {
    std::vector<Poly> cs(static_cast<size_t>(spec.order()) + 1);
    size_t pos = 0;
    for (const auto& [j, dj] : spec.entries) {
        const std::vector<double> seg(coeffs.begin() + static_cast<std::ptrdiff_t>(pos),
                                      coeffs.begin() +
                                          static_cast<std::ptrdiff_t>(pos + dj + 1));
        cs[static_cast<size_t>(j)] = Poly(seg);
        pos += static_cast<size_t>(dj) + 1;
    }
    return DiffOperator(cs);
}

}  // namespace

std::string kind_to_string(ModelKind k) {
    switch (k) {
        case ModelKind::piecewise_polynomial: return "piecewise-polynomial";
        case ModelKind::sinusoid: return "sinusoid";
        case ModelKind::rational: return "rational";
        case ModelKind::exponential: return "exponential";
    }
    throw std::logic_error("kind_to_string: unknown kind");
}

ModelKind kind_from_string(const std::string& s) {
    if (s == "piecewise-polynomial") return ModelKind::piecewise_polynomial;
    if (s == "sinusoid") return ModelKind::sinusoid;
    if (s == "rational") return ModelKind::rational;
    if (s == "exponential") return ModelKind::exponential;
    throw std::invalid_argument("unknown model kind: " + s);
}

int StripeSpec::unknowns() const {
    int total = 0;
    for (const auto& [j, dj] : entries) total += dj + 1;
    return total;
}

int StripeSpec::order() const {
    int m = 0;
    for (const auto& [j, dj] : entries) m = std::max(m, j);
    return m;
}

int StripeSpec::max_degree() const {
    int m = 0;
    for (const auto& [j, dj] : entries) m = std::max(m, dj);
    return m;
}

void StripeSpec::validate() const {
    if (entries.empty()) throw std::invalid_argument("StripeSpec: no stripes");
    int prev = -1;
    for (const auto& [j, dj] : entries) {
        if (j <= prev)
            throw std::invalid_argument("StripeSpec: derivative orders must be ascending");
        if (j < 0 || dj < 0) throw std::invalid_argument("StripeSpec: negative entry");
        prev = j;
    }
}

int min_moment_index(const StripeSpec& spec, int order, int rows) {
    return rows - 1 + 2 * order + spec.max_degree();
}

Eigen::MatrixXd build_H(const MomentSequence& m, const StripeSpec& spec, int order,
                        int rows) {
    spec.validate();
    if (rows < 1) throw std::invalid_argument("build_H: rows must be positive");
    if (order < spec.order())
        throw std::invalid_argument(
            "build_H: annihilator order below the operator order");
    const int need = min_moment_index(spec, order, rows);
    if (m.max_index() < need)
        throw std::invalid_argument("build_H: need moments m_0..m_K with K >= " +
                                    std::to_string(need) + ", got K = " +
                                    std::to_string(m.max_index()));

    Eigen::MatrixXd H(rows, spec.unknowns());
    for (int k = 0; k < rows; ++k) {
        int col = 0;
        for (const auto& [j, dj] : spec.entries)
            for (int i = 0; i <= dj; ++i) H(k, col++) = shifted_moment(i, j, k, m, order);
    }
    return H;
}

NullspaceResult solve_nullspace(const Eigen::MatrixXd& H) {
    if (H.cols() < 2)
        throw std::invalid_argument("solve_nullspace: need at least two unknowns");
    const Eigen::Index rows = H.rows(), cols = H.cols();
    const Eigen::MatrixXd A = H.leftCols(cols - 1);
    const Eigen::VectorXd rhs = -H.col(cols - 1);

    NullspaceResult out;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    out.condition = smin > 0.0 ? smax / smin : kInf;

    if (rows < cols - 1)
        throw std::invalid_argument("solve_nullspace: fewer rows than the reduced system");
    if (smax == 0.0 || (rows == cols - 1 && smin <= 1e-14 * smax)) {
        out.failure_reason = "singular linear system";
        return out;
    }

    Eigen::VectorXd x;
    if (rows == cols - 1) {
        x = A.partialPivLu().solve(rhs);
    } else {
        x = A.colPivHouseholderQr().solve(rhs);
    }
    out.coeffs.assign(x.data(), x.data() + x.size());
    out.coeffs.push_back(1.0);
    out.success = true;
    return out;
}

DecodeResult decode_jumps(const DiffOperator& op_hat, int n_jumps, int multiplicity,
                          double a, double b, double cluster_tol) {
    if (n_jumps < 0) throw std::invalid_argument("decode_jumps: negative jump count");
    if (!(a < b)) throw std::invalid_argument("decode_jumps: empty interval");
    DecodeResult out;
    if (n_jumps == 0) {
        out.op_inner = op_hat;
        out.success = true;
        return out;
    }
    if (multiplicity < 1)
        throw std::invalid_argument("decode_jumps: multiplicity must be positive");

    auto fail = [&out](const char* reason) {
        out.success = false;
        out.failure_reason = reason;
        return out;
    };
    const double imag_cap = 0.1 * (b - a);
    const int want_deg = n_jumps * multiplicity;

    std::vector<std::vector<double>> per_coeff;
    for (int j = 0; j <= op_hat.order(); ++j) {
        const Poly& c = op_hat.coeff(j);
        if (c.is_zero()) continue;
        if (c.degree() < want_deg) return fail("cluster count mismatch");

        const std::vector<std::complex<double>> rs = roots(c);
        double scale = 1.0;
        for (const auto& r : rs) scale = std::max(scale, std::abs(r));
        const double tol =
            cluster_tol > 0.0 ? cluster_tol : default_cluster_tol(multiplicity, scale);

        std::vector<RootCluster> clusters = cluster_roots(rs, tol);
        std::vector<size_t> jump_at;
        for (size_t t = 0; t < clusters.size(); ++t)
            if (clusters[t].multiplicity >= multiplicity) jump_at.push_back(t);

        if (jump_at.size() != static_cast<size_t>(n_jumps)) {
            // scatter exceeded the threshold (or fell under it); when the
            // degree says "jump factor times a constant", force the count
            if (c.degree() != want_deg) return fail("cluster count mismatch");
            clusters = cluster_to_count(rs, n_jumps);
            jump_at.clear();
            for (size_t t = 0; t < clusters.size(); ++t) {
                clusters[t].multiplicity = multiplicity;
                jump_at.push_back(t);
            }
        }

        for (size_t t : jump_at) {
            if (std::abs(clusters[t].center.imag()) > imag_cap)
                return fail("jump outside interval");
            clusters[t].center = {clusters[t].center.real(), 0.0};
        }

        const RefineResult refined = refine_structured(c, clusters);
        std::vector<double> centers;
        centers.reserve(jump_at.size());
        for (size_t t : jump_at) {
            const std::complex<double> z = refined.clusters[t].center;
            if (std::abs(z.imag()) > imag_cap) return fail("jump outside interval");
            centers.push_back(z.real());
        }
        std::sort(centers.begin(), centers.end());
        per_coeff.push_back(std::move(centers));
    }
    if (per_coeff.empty()) return fail("cluster count mismatch");

    // greedy nearest matching against the first coefficient's centers, then
    // arithmetic means across coefficients
    std::vector<double> sums = per_coeff[0];
    for (size_t l = 1; l < per_coeff.size(); ++l) {
        const std::vector<double>& cand = per_coeff[l];
        std::vector<bool> used(cand.size(), false);
        for (size_t i = 0; i < sums.size(); ++i) {
            size_t best = 0;
            double best_d = kInf;
            for (size_t t = 0; t < cand.size(); ++t) {
                const double d = std::abs(cand[t] - per_coeff[0][i]);
                if (!used[t] && d < best_d) {
                    best_d = d;
                    best = t;
                }
            }
            used[best] = true;
            sums[i] += cand[best];
        }
    }
    std::vector<double> jumps(sums.size());
    for (size_t i = 0; i < sums.size(); ++i)
        jumps[i] = sums[i] / static_cast<double>(per_coeff.size());
    std::sort(jumps.begin(), jumps.end());

    for (size_t i = 0; i + 1 < jumps.size(); ++i)
        if (jumps[i + 1] - jumps[i] <= 1e-12 * (b - a))
            return fail("cluster count mismatch");
    for (double x : jumps)
        if (!(x > a && x < b)) return fail("jump outside interval");

    std::vector<double> with_mult;
    for (double x : jumps)
        with_mult.insert(with_mult.end(), static_cast<size_t>(multiplicity), x);
    const Poly qhat = Poly::from_roots(with_mult);

    std::vector<Poly> inner(static_cast<size_t>(op_hat.order()) + 1);
    double worst = 0.0;
    for (int j = 0; j <= op_hat.order(); ++j) {
        const Poly& c = op_hat.coeff(j);
        if (c.is_zero()) continue;
        const auto [quot, rem] = divmod(c, qhat);
        worst = std::max(worst, rem.max_abs_coeff() / std::max(c.max_abs_coeff(), 1e-300));
        inner[static_cast<size_t>(j)] = quot;
    }
    out.jumps = std::move(jumps);
    out.op_inner = DiffOperator(inner);
    out.root_residual = worst;
    out.success = true;
    return out;
}

BasisSet basis_for_nullspace(const DiffOperator& op_inner, ModelKind kind, double a,
                             double b, double ivp_rtol, double ivp_atol) {
    BasisSet out;
    auto fail = [&out](std::string reason) {
        out.success = false;
        out.failure_reason = std::move(reason);
        return out;
    };
    switch (kind) {
        case ModelKind::piecewise_polynomial: {
            const int d = op_inner.order() - 1;
            if (d < 0) return fail("operator order must be positive");
            for (int i = 0; i <= d; ++i)
                out.funcs.emplace_back([i](double x) { return std::pow(x, i); });
            break;
        }
        case ModelKind::sinusoid: {
            if (op_inner.order() != 2) return fail("unexpected operator order");
            const double denom = op_inner.coeff(2)[0];
            if (std::abs(denom) < 1e-300) return fail("degenerate leading stripe");
            const double w2 = op_inner.coeff(0)[0] / denom;
            if (w2 < 0.0) return fail("negative frequency-squared estimate");
            const double w = std::sqrt(w2);
            out.omega = w;
            out.funcs.emplace_back([w](double x) { return std::sin(w * x); });
            out.funcs.emplace_back([w](double x) { return std::cos(w * x); });
            break;
        }
        case ModelKind::rational: {
            if (op_inner.order() != 1) return fail("unexpected operator order");
            try {
                auto sol = std::make_shared<IvpSolution>(
                    solve_ivp(op_inner, a, b, Jet{a, {1.0}}, 2049, ivp_rtol, ivp_atol));
                out.funcs.emplace_back([sol](double x) { return sol->interp(x); });
            } catch (const std::exception& e) {
                return fail(e.what());
            }
            break;
        }
        case ModelKind::exponential: {
            if (op_inner.order() != 1) return fail("unexpected operator order");
            const double c1 = op_inner.coeff(1)[0];
            if (std::abs(c1) < 1e-300) return fail("degenerate leading stripe");
            const double beta = -op_inner.coeff(0)[0] / c1;
            out.beta = beta;
            out.funcs.emplace_back([beta, a](double x) { return std::exp(beta * (x - a)); });
            break;
        }
    }
    out.success = true;
    return out;
}

FitResult build_C_and_solve(const std::vector<std::function<double(double)>>& basis,
                            const std::vector<double>& jumps, const MomentSequence& m,
                            int rows, bool scale_to_m0) {
    if (basis.empty()) throw std::invalid_argument("build_C_and_solve: empty basis");
    for (size_t i = 0; i < jumps.size(); ++i) {
        const bool ordered = i == 0 || jumps[i] > jumps[i - 1];
        if (!ordered || !(jumps[i] > m.a && jumps[i] < m.b))
            throw std::invalid_argument(
                "build_C_and_solve: jumps must be ascending and inside the interval");
    }
    const int nb = static_cast<int>(basis.size());
    const int pieces = static_cast<int>(jumps.size()) + 1;
    const int unknowns = nb * pieces;
    if (rows < unknowns)
        throw std::invalid_argument("build_C_and_solve: need at least " +
                                    std::to_string(unknowns) + " rows, got " +
                                    std::to_string(rows));
    if (rows > static_cast<int>(m.values.size()))
        throw std::invalid_argument("build_C_and_solve: need " + std::to_string(rows) +
                                    " moments, got " + std::to_string(m.values.size()));

    std::vector<double> edges = {m.a};
    edges.insert(edges.end(), jumps.begin(), jumps.end());
    edges.push_back(m.b);

    Eigen::MatrixXd C(rows, unknowns);
    for (int k = 0; k < rows; ++k)
        for (int n = 0; n < pieces; ++n)
            for (int i = 0; i < nb; ++i)
                C(k, n * nb + i) = moment_integral(basis[static_cast<size_t>(i)], k,
                                                   edges[static_cast<size_t>(n)],
                                                   edges[static_cast<size_t>(n) + 1]);
    Eigen::VectorXd mv(rows);
    for (int k = 0; k < rows; ++k) mv(k) = m.values[static_cast<size_t>(k)];
    const double mnorm = std::max(mv.norm(), 1e-300);

    FitResult out;
    if (scale_to_m0) {
        if (unknowns != 1)
            throw std::invalid_argument(
                "build_C_and_solve: zeroth-moment scaling needs a single unknown");
        if (std::abs(C(0, 0)) < 1e-300) {
            out.failure_reason = "rank-deficient least squares";
            return out;
        }
        const double alpha = mv(0) / C(0, 0);
        out.alphas = {alpha};
        out.condition = 1.0;
        out.residual = (C * Eigen::VectorXd::Constant(1, alpha) - mv).norm() / mnorm;
        out.success = true;
        return out;
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    if (qr.rank() < unknowns) {
        out.failure_reason = "rank-deficient least squares";
        return out;
    }
    const Eigen::VectorXd alpha = qr.solve(mv);
    const Eigen::VectorXd rdiag =
        qr.matrixR().topLeftCorner(unknowns, unknowns).diagonal().cwiseAbs();
    out.alphas.assign(alpha.data(), alpha.data() + alpha.size());
    out.condition = rdiag.maxCoeff() / rdiag.minCoeff();
    out.residual = (C * alpha - mv).norm() / mnorm;
    out.success = true;
    return out;
}

StripeSpec stripe_spec_for(ModelKind kind, const ModelParams& p) {
    StripeSpec s;
    switch (kind) {
        case ModelKind::piecewise_polynomial:
            if (p.degree < 0 || p.n_jumps < 0)
                throw std::invalid_argument("piecewise model: negative parameter");
            s.entries = {{p.degree + 1, (p.degree + 1) * p.n_jumps}};
            break;
        case ModelKind::sinusoid:
            if (p.n_jumps < 0) throw std::invalid_argument("sinusoid model: negative jumps");
            s.entries = {{0, 2 * p.n_jumps}, {2, 2 * p.n_jumps}};
            break;
        case ModelKind::rational: {
            if (p.n_jumps != 0)
                throw std::invalid_argument("rational model: single piece only");
            const int r = p.num_degree, q = p.den_degree;
            if (r < 0 || q < 0 || r + q < 1)
                throw std::invalid_argument("rational model: degrees too small");
            s.entries = {{0, r + q - 1}, {1, r + q}};
            break;
        }
        case ModelKind::exponential:
            if (p.n_jumps != 0)
                throw std::invalid_argument("exponential model: single piece only");
            s.entries = {{0, 0}, {1, 0}};
            break;
    }
    return s;
}

int h_rows_for(ModelKind kind, const ModelParams& p) {
    switch (kind) {
        case ModelKind::piecewise_polynomial: return (p.degree + 1) * p.n_jumps;
        case ModelKind::sinusoid: return 2 * (2 * p.n_jumps + 1);
        case ModelKind::rational: return 2 * (p.num_degree + p.den_degree) + 1;
        case ModelKind::exponential: return 1;
    }
    throw std::logic_error("h_rows_for: unknown kind");
}

ReconstructionResult reconstruct(ModelKind kind, const MomentSequence& m,
                                 const ModelParams& params,
                                 const ReconstructOptions& opts) {
    if (!(m.a < m.b)) throw std::invalid_argument("reconstruct: empty interval");
    if (m.values.empty()) throw std::invalid_argument("reconstruct: no moments");

    ReconstructionResult r;
    r.a = m.a;
    r.b = m.b;
    auto fail = [&r](const char* stage, std::string reason) {
        r.success = false;
        r.failed_stage = stage;
        r.failure_reason = std::move(reason);
        return r;
    };

    const StripeSpec spec = stripe_spec_for(kind, params);
    const int order = spec.order();
    const int rows = h_rows_for(kind, params);

    if (rows == 0) {
        // single polynomial piece: annihilator known a priori
        std::vector<Poly> cs(static_cast<size_t>(order) + 1);
        cs.back() = Poly::constant(1.0);
        r.op_hat = DiffOperator(cs);
        r.diagnostics.H_condition = 1.0;
    } else {
        Eigen::MatrixXd H;
        try {
            H = build_H(m, spec, order, rows);
        } catch (const std::invalid_argument& e) {
            return fail("H", e.what());
        }
        const NullspaceResult ns = solve_nullspace(H);
        r.diagnostics.H_condition = ns.condition;
        if (!ns.success) return fail("nullspace", ns.failure_reason);
        r.op_hat = operator_from(spec, ns.coeffs);
    }

    const int multiplicity = kind == ModelKind::sinusoid ? 2 : order;
    const DecodeResult dec =
        decode_jumps(r.op_hat, params.n_jumps, multiplicity, m.a, m.b, opts.cluster_tol);
    r.diagnostics.root_residual = dec.root_residual;
    if (!dec.success) return fail("decode", dec.failure_reason);
    r.jumps = dec.jumps;
    r.op_inner = dec.op_inner;

    const BasisSet basis =
        basis_for_nullspace(r.op_inner, kind, m.a, m.b, opts.ivp_rtol, opts.ivp_atol);
    if (!basis.success) return fail("basis", basis.failure_reason);
    r.omega = basis.omega;
    r.beta = basis.beta;
    r.basis = basis.funcs;

    const int unknowns =
        static_cast<int>(basis.funcs.size()) * (params.n_jumps + 1);
    const int avail = static_cast<int>(m.values.size());
    const int c_rows = opts.c_rows > 0 ? opts.c_rows : std::min(avail, unknowns + 4);
    const bool scale_to_m0 =
        kind == ModelKind::rational || kind == ModelKind::exponential;
    FitResult fit;
    try {
        fit = build_C_and_solve(basis.funcs, r.jumps, m, c_rows, scale_to_m0);
    } catch (const std::invalid_argument& e) {
        return fail("fit", e.what());
    }
    r.diagnostics.C_condition = fit.condition;
    r.diagnostics.fit_residual = fit.residual;
    if (!fit.success) return fail("fit", fit.failure_reason);
    r.alphas = fit.alphas;
    r.success = true;
    return r;
}

SampledSignal render(const ReconstructionResult& r, int n) {
    if (!r.success) throw std::logic_error("render: reconstruction was not successful");
    if (n < 2) throw std::invalid_argument("render: need at least two points");
    const size_t nb = r.basis.size();
    SampledSignal s;
    s.a = r.a;
    s.b = r.b;
    s.values.resize(static_cast<size_t>(n));
    for (int idx = 0; idx < n; ++idx) {
        const double x = r.a + (r.b - r.a) * idx / (n - 1);
        const size_t piece = static_cast<size_t>(
            std::upper_bound(r.jumps.begin(), r.jumps.end(), x) - r.jumps.begin());
        double v = 0.0;
        for (size_t i = 0; i < nb; ++i) v += r.alphas[piece * nb + i] * r.basis[i](x);
        s.values[static_cast<size_t>(idx)] = v;
    }
    return s;
}

}  // namespace mominv
