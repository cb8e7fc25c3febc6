// Command-line front end. Four subcommands:
//   simulate     sample a model, optionally add noise, write samples/moments
//   reconstruct  recover a model of the given shape from a moments file
//   sweep        accuracy vs noise level, jump count, or denominator degree
//   verify       the operator-identity suite; nonzero exit on any failure
// All runs are serial and seeded, so outputs are byte-identical across reruns
// with the same arguments.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mominv/diffop.hpp"
#include "mominv/invert.hpp"
#include "mominv/poly.hpp"
#include "mominv/shiftop.hpp"
#include "mominv/signal.hpp"
#include "mominv/signal_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mominv;

namespace {

constexpr double knan = std::numeric_limits<double>::quiet_NaN();

// The inversion side needs only the model's shape: which driver applies, the
// jump count, and the degrees. Models mixing piece kinds have no driver.
struct Structure {
    ModelKind kind = ModelKind::piecewise_polynomial;
    ModelParams params;
};

Structure structure_of(const PiecewiseSignal& f) {
    Structure st;
    st.params.n_jumps = static_cast<int>(f.breakpoints.size());
    const bool all_poly = std::all_of(f.pieces.begin(), f.pieces.end(), [](const PieceModel& p) {
        return std::holds_alternative<PolynomialPiece>(p);
    });
    if (all_poly) {
        st.kind = ModelKind::piecewise_polynomial;
        for (const PieceModel& p : f.pieces) {
            const int d = std::get<PolynomialPiece>(p).poly.degree();
            st.params.degree = std::max(st.params.degree, std::max(0, d));
        }
        return st;
    }
    const bool all_sin = std::all_of(f.pieces.begin(), f.pieces.end(), [](const PieceModel& p) {
        return std::holds_alternative<SinusoidPiece>(p);
    });
    if (all_sin) {
        st.kind = ModelKind::sinusoid;
        return st;
    }
    if (f.pieces.size() == 1) {
        if (const auto* r = std::get_if<RationalPiece>(&f.pieces.front())) {
            st.kind = ModelKind::rational;
            st.params.num_degree = std::max(0, r->num.degree());
            st.params.den_degree = std::max(0, r->den.degree());
            return st;
        }
        if (std::holds_alternative<ExponentialPiece>(f.pieces.front())) {
            st.kind = ModelKind::exponential;
            return st;
        }
    }
    throw std::invalid_argument(
        "no reconstruction driver for this model: pieces must be all polynomial, "
        "all sinusoid, a single rational, or a single exponential");
}

int basis_count_for(const Structure& st) {
    switch (st.kind) {
        case ModelKind::piecewise_polynomial: return st.params.degree + 1;
        case ModelKind::sinusoid: return 2;
        default: return 1;
    }
}

// Top moment index the pipeline needs: the operator-recovery stage sets the
// floor, and the fit stage must at least be square.
int needed_max_moment(const Structure& st) {
    const StripeSpec spec = stripe_spec_for(st.kind, st.params);
    const int rows = h_rows_for(st.kind, st.params);
    const int for_h = rows > 0 ? min_moment_index(spec, spec.order(), rows) : 0;
    const int for_fit = basis_count_for(st) * (st.params.n_jumps + 1) - 1;
    return std::max(for_h, for_fit);
}

double true_omega(const PiecewiseSignal& f) {
    for (const PieceModel& p : f.pieces)
        if (const auto* s = std::get_if<SinusoidPiece>(&p)) return s->omega;
    return 0.0;
}

double empirical_snr_db(const SampledSignal& clean, const SampledSignal& noisy) {
    double ps = 0.0, pn = 0.0;
    for (size_t i = 0; i < clean.values.size(); ++i) {
        const double d = noisy.values[i] - clean.values[i];
        ps += clean.values[i] * clean.values[i];
        pn += d * d;
    }
    return 10.0 * std::log10(ps / pn);
}

double median(std::vector<double> v) {
    if (v.empty()) return knan;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

json result_json(const ReconstructionResult& r, const Structure& st, double mse_val,
                 bool have_mse) {
    json j;
    j["success"] = r.success;
    j["failed_stage"] = r.success ? json(nullptr) : json(r.failed_stage);
    j["failure_reason"] = r.success ? json(nullptr) : json(r.failure_reason);
    j["kind"] = kind_to_string(st.kind);
    j["interval"] = {r.a, r.b};
    j["n_jumps"] = st.params.n_jumps;
    j["jumps"] = r.jumps;
    j["omega"] = (st.kind == ModelKind::sinusoid && r.success) ? json(r.omega) : json(nullptr);
    j["beta"] = (st.kind == ModelKind::exponential && r.success) ? json(r.beta) : json(nullptr);
    j["alphas"] = r.alphas;
    json op = json::array();
    for (int d = 0; d <= r.op_hat.order(); ++d) {
        const Poly& c = r.op_hat.coeff(d);
        if (c.is_zero()) continue;
        op.push_back({{"order", d}, {"coeffs", c.coeffs()}});
    }
    j["operator"] = op;
    j["diagnostics"] = {{"H_condition", r.diagnostics.H_condition},
                        {"root_residual", r.diagnostics.root_residual},
                        {"C_condition", r.diagnostics.C_condition},
                        {"fit_residual", r.diagnostics.fit_residual}};
    j["mse"] = have_mse ? json(mse_val) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string model_path;
    int grid = 4096;
    int top_moment = 32;
    double snr_db = 0.0;
    bool have_snr = false;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

int run_simulate(const SimulateOpts& o) {
    const PiecewiseSignal f = load_signal(o.model_path);
    const SampledSignal clean = sample(f, o.grid);
    SampledSignal data = clean;
    double esnr = 0.0;
    if (o.have_snr) {
        data = add_noise(clean, o.snr_db, o.seed);
        esnr = empirical_snr_db(clean, data);
    }
    const MomentSequence m = moments_quadrature(data, o.top_moment);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    save_samples_csv((dir / "samples.csv").string(), data);
    save_moments_csv((dir / "moments.csv").string(), m);

    json meta;
    meta["model"] = o.model_path;
    meta["interval"] = {f.a, f.b};
    meta["grid"] = o.grid;
    meta["top_moment"] = o.top_moment;
    meta["snr_db"] = o.have_snr ? json(o.snr_db) : json(nullptr);
    meta["empirical_snr_db"] = o.have_snr ? json(esnr) : json(nullptr);
    meta["seed"] = o.have_snr ? json(o.seed) : json(nullptr);
    write_text(dir / "meta.json", meta.dump(2) + "\n");

    std::cout << "wrote " << (dir / "samples.csv").string() << " (" << data.size()
              << " samples)\n";
    std::cout << "wrote " << (dir / "moments.csv").string() << " (m_0..m_" << m.max_index()
              << ")\n";
    std::cout << "wrote " << (dir / "meta.json").string() << "\n";
    if (o.have_snr)
        std::cout << "requested snr " << format_double(o.snr_db) << " dB, empirical "
                  << format_double(esnr) << " dB\n";
    return 0;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructOpts {
    std::string model_path;
    std::string moments_path;
    int grid = 1025;
    std::string out_dir = ".";
    double tol_roots = 0.0;
    double ivp_rtol = 1e-10;
    double ivp_atol = 1e-12;
};

int run_reconstruct(const ReconstructOpts& o) {
    const PiecewiseSignal f = load_signal(o.model_path);
    const Structure st = structure_of(f);
    const MomentSequence m = load_moments_csv(o.moments_path, f.a, f.b);

    const int need = needed_max_moment(st);
    if (m.max_index() < need) {
        std::cerr << "error: this model needs moments m_0..m_K with K >= " << need << "; "
                  << o.moments_path << " has K = " << m.max_index() << "\n";
        return 2;
    }

    ReconstructOptions opts;
    opts.cluster_tol = o.tol_roots;
    opts.ivp_rtol = o.ivp_rtol;
    opts.ivp_atol = o.ivp_atol;
    const ReconstructionResult r = reconstruct(st.kind, m, st.params, opts);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    double mse_val = 0.0;
    bool have_mse = false;
    if (r.success) {
        const SampledSignal rec = render(r, o.grid);
        save_samples_csv((dir / "reconstruction.csv").string(), rec);
        mse_val = mse(rec, sample(f, o.grid));
        have_mse = true;
    }
    write_text(dir / "result.json", result_json(r, st, mse_val, have_mse).dump(2) + "\n");

    if (!r.success) {
        std::cerr << "reconstruction failed in stage " << r.failed_stage << ": "
                  << r.failure_reason << "\n";
        std::cerr << "details in " << (dir / "result.json").string() << "\n";
        return 3;
    }
    std::cout << "kind " << kind_to_string(st.kind);
    if (!r.jumps.empty()) {
        std::cout << ", jumps";
        for (double x : r.jumps) std::cout << " " << format_double(x);
    }
    if (st.kind == ModelKind::sinusoid) std::cout << ", omega " << format_double(r.omega);
    if (st.kind == ModelKind::exponential) std::cout << ", beta " << format_double(r.beta);
    std::cout << ", mse " << format_double(mse_val) << "\n";
    std::cout << "wrote " << (dir / "result.json").string() << " and "
              << (dir / "reconstruction.csv").string() << "\n";
    return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepOpts {
    std::string axis;
    std::string axis_values;
    int trials = 20;
    int grid = 4096;
    int top_moment = 0;  // 0: smallest admissible + 8
    double snr_db = knan;
    std::uint64_t seed = 1;
    std::string model_path;
    std::string out_dir = ".";
};

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) v.push_back(std::stod(tok));
    }
    return v;
}

std::vector<double> default_axis_values(const std::string& axis) {
    if (axis == "snr") return {10.0, 20.0, 30.0, 40.0, 50.0};
    if (axis == "n_jumps") return {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    return {1.0, 2.0, 3.0, 4.0};
}

PiecewiseSignal pw_constants(const std::vector<double>& jumps, const std::vector<double>& vals) {
    PiecewiseSignal f;
    f.a = 0.0;
    f.b = 1.0;
    f.breakpoints = jumps;
    for (double v : vals) f.pieces.push_back(PolynomialPiece{Poly::constant(v)});
    return f;
}

PiecewiseSignal sweep_model(const std::string& axis, double v, const PiecewiseSignal* base) {
    if (axis == "snr") {
        if (base) return *base;
        return pw_constants({0.35, 0.7}, {1.0, -2.0, 1.5});
    }
    if (axis == "n_jumps") {
        const int n = static_cast<int>(v);
        std::vector<double> jumps, vals;
        for (int i = 0; i < n; ++i)
            jumps.push_back(static_cast<double>(i + 1) / static_cast<double>(n + 1));
        for (int i = 0; i <= n; ++i) vals.push_back(i % 2 == 0 ? 1.5 : -1.0);
        return pw_constants(jumps, vals);
    }
    // degree axis: fixed numerator, denominator of the requested degree with
    // every root far from [0, 1]
    const int s = static_cast<int>(v);
    Poly den = Poly::constant(1.0);
    const Poly quad({5.0, -4.0, 1.0});
    for (int i = 0; i < s / 2; ++i) den *= quad;
    if (s % 2 == 1) den *= Poly({2.0, 1.0});
    PiecewiseSignal f;
    f.a = 0.0;
    f.b = 1.0;
    f.pieces = {RationalPiece{Poly({1.0, 0.0, 1.0}), den}};
    return f;
}

int run_sweep(const SweepOpts& o) {
    const std::vector<double> values =
        o.axis_values.empty() ? default_axis_values(o.axis) : parse_values(o.axis_values);
    if (values.empty()) {
        std::cerr << "error: empty axis value list\n";
        return 2;
    }
    if (o.axis != "snr") {
        for (double v : values)
            if (v < 1.0 || v != std::floor(v)) {
                std::cerr << "error: " << o.axis << " axis values must be positive integers\n";
                return 2;
            }
        if (!o.model_path.empty()) {
            std::cerr << "error: --model only applies to the snr axis\n";
            return 2;
        }
    }
    std::optional<PiecewiseSignal> base;
    if (!o.model_path.empty()) base = load_signal(o.model_path);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    std::ofstream rows(dir / "sweep.csv");
    rows << "axis,trial,seed,mse,jump_relerr,freq_relerr,success\n";
    std::ofstream summary(dir / "summary.csv");
    summary << "axis,trials,successes,median_mse,median_jump_relerr,median_freq_relerr\n";

    for (size_t ai = 0; ai < values.size(); ++ai) {
        const double v = values[ai];
        const PiecewiseSignal model = sweep_model(o.axis, v, base ? &*base : nullptr);
        const Structure st = structure_of(model);
        const double snr_db =
            o.axis == "snr" ? v : (std::isnan(o.snr_db) ? (o.axis == "degree" ? 40.0 : 50.0)
                                                        : o.snr_db);
        const int top =
            o.top_moment > 0 ? o.top_moment : needed_max_moment(st) + 8;
        const SampledSignal clean = sample(model, o.grid);
        const double omega0 = true_omega(model);

        std::vector<double> mses, jerrs, ferrs;
        int successes = 0;
        for (int t = 0; t < o.trials; ++t) {
            const std::uint64_t seed = o.seed + 1000003ull * static_cast<std::uint64_t>(ai) +
                                       static_cast<std::uint64_t>(t);
            const SampledSignal noisy = add_noise(clean, snr_db, seed);
            const MomentSequence m = moments_quadrature(noisy, top);
            const ReconstructionResult r = reconstruct(st.kind, m, st.params);
            double mse_v = knan, jerr = knan, ferr = knan;
            if (r.success) {
                ++successes;
                mse_v = mse(render(r, o.grid), clean);
                mses.push_back(mse_v);
                if (!model.breakpoints.empty() &&
                    r.jumps.size() == model.breakpoints.size()) {
                    double worst = 0.0;
                    for (size_t i = 0; i < r.jumps.size(); ++i)
                        worst = std::max(worst, std::abs(r.jumps[i] - model.breakpoints[i]));
                    jerr = worst / (model.b - model.a);
                    jerrs.push_back(jerr);
                }
                if (st.kind == ModelKind::sinusoid && omega0 > 0.0) {
                    ferr = std::abs(r.omega - omega0) / omega0;
                    ferrs.push_back(ferr);
                }
            }
            rows << format_double(v) << ',' << t << ',' << seed << ',' << format_double(mse_v)
                 << ',' << format_double(jerr) << ',' << format_double(ferr) << ','
                 << (r.success ? 1 : 0) << '\n';
        }
        summary << format_double(v) << ',' << o.trials << ',' << successes << ','
                << format_double(median(mses)) << ',' << format_double(median(jerrs)) << ','
                << format_double(median(ferrs)) << '\n';
        std::cout << o.axis << "=" << format_double(v) << ": " << successes << "/" << o.trials
                  << " succeeded";
        if (!mses.empty()) std::cout << ", median mse " << format_double(median(mses));
        std::cout << "\n";
    }
    std::cout << "wrote " << (dir / "sweep.csv").string() << " and "
              << (dir / "summary.csv").string() << "\n";
    return 0;
}

// ------------------------------------------------------------------ verify

int run_verify() {
    bool all = true;
    const auto report = [&all](bool ok, const std::string& name) {
        std::cout << (ok ? "PASS  " : "FAIL  ") << name << "\n";
        all = all && ok;
    };

    {
        // x^2 f''' + 3x f'' + (1 - 4x^2) f' - 4x f: the moment transform of
        // this Bessel-type operator collapses to two terms.
        const DiffOperator op(std::vector<Poly>{Poly({0.0, -4.0}), Poly({1.0, 0.0, -4.0}),
                                                Poly({0.0, 3.0}), Poly({0.0, 0.0, 1.0})});
        const ShiftOperator s = mellin_transform(op);
        const Poly up = s.coeff(1);   // 4(k + 1)
        const Poly dn = s.coeff(-1);  // -k^3
        bool ok = s.terms().size() == 2;
        ok = ok && up.degree() == 1 && std::abs(up[0] - 4.0) <= 1e-12 &&
             std::abs(up[1] - 4.0) <= 1e-12;
        ok = ok && dn.degree() == 3 && std::abs(dn[0]) <= 1e-12 && std::abs(dn[1]) <= 1e-12 &&
             std::abs(dn[2]) <= 1e-12 && std::abs(dn[3] + 1.0) <= 1e-12;
        report(ok, "Bessel-type operator reduces to the recurrence 4(k+1) m_{k+1} = k^3 m_{k-1}");
    }
    {
        // f' = 0.7 f on [0, 1]: annihilator in closed form, printed below
        const ShiftOperator ann = moment_annihilator(
            DiffOperator(std::vector<Poly>{Poly::constant(-0.7), Poly::constant(1.0)}), 0.0,
            1.0);
        ShiftOperator want;
        want.add_term(0, Poly({1.0, 1.0}));
        want.add_term(1, Poly({-1.3, -1.0}));
        want.add_term(2, Poly::constant(-0.7));
        const std::string line = to_string(ann);
        const bool ok = approx_equal(ann, want, 1e-12) &&
                        line == "(k + 1)*m_k + (-k - 1.3)*m_{k+1} + (-0.7)*m_{k+2} = 0";
        report(ok, "exponential moment annihilator on [0, 1] matches its closed form");
        std::cout << "      " << line << "\n";
    }
    {
        // (1 - x^2) y'' - 2x y' + lambda y with the degree-5 orthogonal
        // polynomial on [-1, 1]: one shifted-moment row pins lambda = 30.
        PiecewiseSignal f;
        f.a = -1.0;
        f.b = 1.0;
        f.pieces = {PolynomialPiece{
            Poly({0.0, 15.0 / 8.0, 0.0, -70.0 / 8.0, 0.0, 63.0 / 8.0})}};
        const MomentSequence m = moments_exact(f, 12);
        const double e00 = shifted_moment(0, 0, 1, m, 2);
        const double e11 = shifted_moment(1, 1, 1, m, 2);
        const double e02 = shifted_moment(0, 2, 1, m, 2);
        const double e22 = shifted_moment(2, 2, 1, m, 2);
        const bool ok =
            e00 != 0.0 && std::abs((2.0 * e11 - e02 + e22) / e00 - 30.0) <= 30.0 * 1e-8;
        report(ok, "Legendre eigenvalue 30 drops out of a single moment row");
    }
    {
        // left-multiplying the operator by q(x) composes q(E) onto the
        // transform; checked on random operator/polynomial pairs
        std::mt19937 rng(47u);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const auto rand_poly = [&](int deg) {
            std::vector<double> c(static_cast<size_t>(deg) + 1);
            for (double& x : c) x = u(rng);
            if (std::abs(c.back()) < 0.25) c.back() = 0.5;
            return Poly(c);
        };
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            const int order = 1 + trial % 3;
            std::vector<Poly> cs;
            for (int j = 0; j <= order; ++j) cs.push_back(rand_poly(1 + (trial + j) % 3));
            const DiffOperator op(cs);
            const Poly q = rand_poly(1 + trial % 2);
            const ShiftOperator lhs = mellin_transform(multiply_by_poly(op, q));
            const ShiftOperator rhs = compose(shift_from_poly(q), mellin_transform(op));
            ok = ok && approx_equal(lhs, rhs, 1e-12);
        }
        report(ok, "multiplication by q(x) composes q(E) onto the transform (20 random pairs)");
    }

    if (!all) {
        std::cerr << "verify: identity check failed\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise D-finite models: simulate moments, reconstruct, sweep accuracy"};
    app.require_subcommand(1);

    SimulateOpts so;
    CLI::App* sim = app.add_subcommand(
        "simulate", "sample a model, optionally add noise, write samples/moments/meta");
    sim->add_option("--model", so.model_path, "model JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sim->add_option("--grid", so.grid, "number of samples")
        ->capture_default_str()
        ->check(CLI::Range(2, 1 << 24));
    sim->add_option("--moments", so.top_moment, "top moment index K")
        ->capture_default_str()
        ->check(CLI::Range(0, 4096));
    CLI::Option* snr_opt =
        sim->add_option("--snr", so.snr_db, "noise level in dB (omit for noiseless)");
    sim->add_option("--seed", so.seed, "noise seed")->capture_default_str();
    sim->add_option("--out", so.out_dir, "output directory")->capture_default_str();

    ReconstructOpts ro;
    CLI::App* rec = app.add_subcommand(
        "reconstruct", "recover a model of the given shape from a moments file");
    rec->add_option("--model", ro.model_path, "model JSON file fixing the shape")
        ->required()
        ->check(CLI::ExistingFile);
    rec->add_option("--moments", ro.moments_path, "moments CSV")
        ->required()
        ->check(CLI::ExistingFile);
    rec->add_option("--grid", ro.grid, "render grid for reconstruction.csv and mse")
        ->capture_default_str()
        ->check(CLI::Range(2, 1 << 24));
    rec->add_option("--tol-roots", ro.tol_roots, "jump clustering tolerance (0: automatic)")
        ->capture_default_str();
    rec->add_option("--rtol", ro.ivp_rtol, "basis integration relative tolerance")
        ->capture_default_str();
    rec->add_option("--atol", ro.ivp_atol, "basis integration absolute tolerance")
        ->capture_default_str();
    rec->add_option("--out", ro.out_dir, "output directory")->capture_default_str();

    SweepOpts wo;
    CLI::App* swp = app.add_subcommand(
        "sweep", "reconstruction accuracy across noise level, jump count, or degree");
    swp->add_option("--axis", wo.axis, "sweep axis")
        ->required()
        ->check(CLI::IsMember({"snr", "n_jumps", "degree"}));
    swp->add_option("--axis-values", wo.axis_values, "comma-separated axis values");
    swp->add_option("--trials", wo.trials, "noise draws per axis value")
        ->capture_default_str()
        ->check(CLI::Range(1, 100000));
    swp->add_option("--grid", wo.grid, "sample grid size")
        ->capture_default_str()
        ->check(CLI::Range(2, 1 << 24));
    swp->add_option("--moments", wo.top_moment,
                    "top moment index K (0: smallest admissible + 8)")
        ->capture_default_str()
        ->check(CLI::Range(0, 4096));
    swp->add_option("--snr", wo.snr_db, "noise level for non-snr axes (dB)");
    swp->add_option("--seed", wo.seed, "base seed; trial seeds derive from it")
        ->capture_default_str();
    swp->add_option("--model", wo.model_path, "base model for the snr axis")
        ->check(CLI::ExistingFile);
    swp->add_option("--out", wo.out_dir, "output directory")->capture_default_str();

    CLI::App* ver =
        app.add_subcommand("verify", "run the operator-identity suite; nonzero exit on failure");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            so.have_snr = snr_opt->count() > 0;
            return run_simulate(so);
        }
        if (*rec) return run_reconstruct(ro);
        if (*swp) return run_sweep(wo);
        if (*ver) return run_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
