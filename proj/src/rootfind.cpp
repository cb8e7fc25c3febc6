#include "mominv/rootfind.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mominv {

namespace {

using cd = std::complex<double>;

bool complex_less(const cd& u, const cd& v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
}

RootCluster make_cluster(std::vector<cd> members) {
    std::sort(members.begin(), members.end(), complex_less);
    cd sum = std::accumulate(members.begin(), members.end(), cd{0.0, 0.0});
    RootCluster c;
    c.center = sum / static_cast<double>(members.size());
    c.multiplicity = static_cast<int>(members.size());
    c.members = std::move(members);
    return c;
}

void sort_clusters(std::vector<RootCluster>& cs) {
    std::sort(cs.begin(), cs.end(), [](const RootCluster& u, const RootCluster& v) {
        return complex_less(u.center, v.center);
    });
}

// min over member pairs
double linkage(const std::vector<cd>& u, const std::vector<cd>& v) {
    double d = std::numeric_limits<double>::infinity();
    for (const cd& x : u)
        for (const cd& y : v) d = std::min(d, std::abs(x - y));
    return d;
}

// coefficients of prod (x - z_i)^{m_i}, ascending
std::vector<cd> structured_coeffs(const std::vector<cd>& centers,
                                  const std::vector<int>& mults) {
    std::vector<cd> c = {cd{1.0, 0.0}};
    for (size_t i = 0; i < centers.size(); ++i) {
        for (int rep = 0; rep < mults[i]; ++rep) {
            std::vector<cd> next(c.size() + 1, cd{0.0, 0.0});
            for (size_t j = 0; j < c.size(); ++j) {
                next[j] -= centers[i] * c[j];
                next[j + 1] += c[j];
            }
            c = std::move(next);
        }
    }
    return c;
}

// exact synthetic division by (x - z); input must have z as a root
std::vector<cd> deflate_once(const std::vector<cd>& c, const cd& z) {
    std::vector<cd> q(c.size() - 1);
    cd carry = c.back();
    for (size_t j = c.size() - 1; j-- > 0;) {
        q[j] = carry;
        carry = c[j] + z * carry;
    }
    return q;
}

}  // namespace

double default_cluster_tol(int max_multiplicity, double scale) {
    if (max_multiplicity < 1) throw std::invalid_argument("default_cluster_tol: multiplicity must be positive");
    if (!(scale > 0.0)) throw std::invalid_argument("default_cluster_tol: scale must be positive");
    return 10.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / max_multiplicity) * scale;
}

std::vector<RootCluster> cluster_roots(const std::vector<cd>& roots, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("cluster_roots: tol must be positive");
    std::vector<cd> pts = roots;
    std::sort(pts.begin(), pts.end(), complex_less);
    const size_t n = pts.size();

    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), size_t{0});
    auto find = [&](size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (std::abs(pts[i] - pts[j]) <= tol) parent[find(i)] = find(j);

    std::vector<std::vector<cd>> groups(n);
    for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(pts[i]);

    std::vector<RootCluster> out;
    for (auto& g : groups) {
        if (g.empty()) continue;
        RootCluster c = make_cluster(std::move(g));
        if (std::abs(c.center.imag()) < tol) c.center = cd{c.center.real(), 0.0};
        out.push_back(std::move(c));
    }
    sort_clusters(out);
    return out;
}

std::vector<RootCluster> cluster_to_count(const std::vector<cd>& roots, int count) {
    if (count < 1) throw std::invalid_argument("cluster_to_count: count must be positive");
    if (roots.size() < static_cast<size_t>(count))
        throw std::invalid_argument("cluster_to_count: fewer roots than requested clusters");
    std::vector<cd> pts = roots;
    std::sort(pts.begin(), pts.end(), complex_less);

    std::vector<std::vector<cd>> groups;
    for (const cd& z : pts) groups.push_back({z});
    while (groups.size() > static_cast<size_t>(count)) {
        size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < groups.size(); ++i)
            for (size_t j = i + 1; j < groups.size(); ++j) {
                const double d = linkage(groups[i], groups[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    std::vector<RootCluster> out;
    out.reserve(groups.size());
    for (auto& g : groups) out.push_back(make_cluster(std::move(g)));
    sort_clusters(out);
    return out;
}

RefineResult refine_structured(const Poly& p, std::vector<RootCluster> clusters) {
    if (p.is_zero() || p.degree() < 1)
        throw std::invalid_argument("refine_structured: polynomial must have degree >= 1");
    if (clusters.empty()) throw std::invalid_argument("refine_structured: no clusters");
    const int d = p.degree();
    int total = 0;
    for (const RootCluster& c : clusters) {
        if (c.multiplicity < 1)
            throw std::invalid_argument("refine_structured: multiplicities must be positive");
        total += c.multiplicity;
    }
    if (total != d)
        throw std::invalid_argument(
            "refine_structured: multiplicities must sum to the polynomial degree");

    const Poly mp = p.monic();
    std::vector<cd> target(static_cast<size_t>(d) + 1);
    for (int i = 0; i <= d; ++i) target[static_cast<size_t>(i)] = cd{mp[i], 0.0};

    const size_t nvar = clusters.size();
    std::vector<cd> z(nvar);
    std::vector<int> mult(nvar);
    for (size_t i = 0; i < nvar; ++i) {
        z[i] = clusters[i].center;
        mult[i] = clusters[i].multiplicity;
    }

    auto residual_of = [&](const std::vector<cd>& zz) {
        const std::vector<cd> c = structured_coeffs(zz, mult);
        Eigen::VectorXcd r(d);
        for (int i = 0; i < d; ++i)
            r(i) = c[static_cast<size_t>(i)] - target[static_cast<size_t>(i)];
        return r;
    };

    Eigen::VectorXcd r = residual_of(z);
    double rnorm = r.norm();
    bool converged = rnorm == 0.0;

    for (int iter = 0; iter < 50 && !converged; ++iter) {
        const std::vector<cd> prod = structured_coeffs(z, mult);
        Eigen::MatrixXcd J(d, static_cast<int>(nvar));
        for (size_t i = 0; i < nvar; ++i) {
            const std::vector<cd> q = deflate_once(prod, z[i]);
            for (int row = 0; row < d; ++row)
                J(row, static_cast<int>(i)) =
                    -static_cast<double>(mult[i]) * q[static_cast<size_t>(row)];
        }
        const Eigen::VectorXcd step = J.colPivHouseholderQr().solve(-r);

        double t = 1.0;
        std::vector<cd> znew(nvar);
        Eigen::VectorXcd rnew;
        double rnew_norm = std::numeric_limits<double>::infinity();
        while (t > 1e-9) {
            for (size_t i = 0; i < nvar; ++i) znew[i] = z[i] + t * step(static_cast<int>(i));
            rnew = residual_of(znew);
            rnew_norm = rnew.norm();
            if (rnew_norm <= rnorm) break;
            t *= 0.5;
        }
        if (rnew_norm > rnorm) break;  // no improving step: stagnated

        double zscale = 0.0, stepsize = 0.0;
        for (size_t i = 0; i < nvar; ++i) {
            zscale = std::max(zscale, std::abs(znew[i]));
            stepsize = std::max(stepsize, std::abs(t * step(static_cast<int>(i))));
        }
        z = znew;
        r = rnew;
        rnorm = rnew_norm;
        if (stepsize <= 1e-12 * std::max(1.0, zscale)) converged = true;
        if (rnorm <= 1e-14 * std::max(1.0, mp.max_abs_coeff())) converged = true;
    }

    RefineResult out;
    out.clusters = std::move(clusters);
    for (size_t i = 0; i < nvar; ++i) out.clusters[i].center = z[i];
    out.residual = rnorm;
    out.converged = converged;
    return out;
}

}  // namespace mominv
