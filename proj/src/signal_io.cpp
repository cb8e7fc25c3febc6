#include "mominv/signal_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mominv {

using nlohmann::json;

namespace {

json poly_to_json(const Poly& p) {
    json a = json::array();
    for (int i = 0; i <= p.degree(); ++i) a.push_back(p[i]);
    if (a.empty()) a.push_back(0.0);
    return a;
}

Poly poly_from_json(const json& a, const char* what) {
    if (!a.is_array() || a.empty())
        throw std::invalid_argument(std::string("model: ") + what +
                                    " must be a nonempty array of coefficients");
    std::vector<double> c;
    for (const auto& v : a) c.push_back(v.get<double>());
    return Poly(std::move(c));
}

json piece_to_json(const PieceModel& piece) {
    json j;
    if (const auto* pp = std::get_if<PolynomialPiece>(&piece)) {
        j["kind"] = "polynomial";
        j["coeffs"] = poly_to_json(pp->poly);
    } else if (const auto* sp = std::get_if<SinusoidPiece>(&piece)) {
        j["kind"] = "sinusoid";
        j["amplitude"] = sp->amplitude;
        j["omega"] = sp->omega;
        j["phase"] = sp->phase;
    } else if (const auto* ep = std::get_if<ExponentialPiece>(&piece)) {
        j["kind"] = "exponential";
        j["alpha"] = ep->alpha;
        j["beta"] = ep->beta;
    } else if (const auto* rp = std::get_if<RationalPiece>(&piece)) {
        j["kind"] = "rational";
        j["numerator"] = poly_to_json(rp->num);
        j["denominator"] = poly_to_json(rp->den);
    } else if (const auto* op = std::get_if<OdePiece>(&piece)) {
        j["kind"] = "ode";
        json cs = json::array();
        for (const auto& c : op->op.coeffs()) cs.push_back(poly_to_json(c));
        j["op"] = cs;
        j["init"] = op->init;
    }
    return j;
}

PieceModel piece_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polynomial") return PolynomialPiece{poly_from_json(j.at("coeffs"), "coeffs")};
    if (kind == "sinusoid")
        return SinusoidPiece{j.at("amplitude").get<double>(), j.at("omega").get<double>(),
                             j.value("phase", 0.0)};
    if (kind == "exponential")
        return ExponentialPiece{j.at("alpha").get<double>(), j.at("beta").get<double>()};
    if (kind == "rational")
        return RationalPiece{poly_from_json(j.at("numerator"), "numerator"),
                             poly_from_json(j.at("denominator"), "denominator")};
    if (kind == "ode") {
        std::vector<Poly> cs;
        for (const auto& c : j.at("op")) cs.push_back(poly_from_json(c, "op"));
        return OdePiece{DiffOperator(std::move(cs)), j.at("init").get<std::vector<double>>()};
    }
    throw std::invalid_argument("model: unknown piece kind '" + kind + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

PiecewiseSignal signal_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model: invalid JSON: ") + e.what());
    }
    PiecewiseSignal f;
    const auto& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2)
        throw std::invalid_argument("model: interval must be [a, b]");
    f.a = iv[0].get<double>();
    f.b = iv[1].get<double>();
    if (j.contains("breakpoints"))
        f.breakpoints = j["breakpoints"].get<std::vector<double>>();
    for (const auto& p : j.at("pieces")) f.pieces.push_back(piece_from_json(p));
    f.validate();
    return f;
}

std::string signal_to_json(const PiecewiseSignal& f) {
    json j;
    j["interval"] = {f.a, f.b};
    j["breakpoints"] = f.breakpoints;
    json ps = json::array();
    for (const auto& p : f.pieces) ps.push_back(piece_to_json(p));
    j["pieces"] = ps;
    return j.dump(2) + "\n";
}

PiecewiseSignal load_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return signal_from_json(ss.str());
}

void save_moments_csv(const std::string& path, const MomentSequence& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "k,m_k\n";
    for (size_t k = 0; k < m.values.size(); ++k)
        out << k << "," << format_double(m.values[k]) << "\n";
}

MomentSequence load_moments_csv(const std::string& path, double a, double b) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open moments file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "k,m_k")
        throw std::invalid_argument("moments CSV must start with header 'k,m_k': " + path);
    MomentSequence m;
    m.a = a;
    m.b = b;
    int expect = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("moments CSV: malformed row '" + line + "'");
        const int k = std::stoi(line.substr(0, comma));
        if (k != expect)
            throw std::invalid_argument("moments CSV: indices must be contiguous from 0");
        m.values.push_back(std::stod(line.substr(comma + 1)));
        ++expect;
    }
    if (m.values.empty()) throw std::invalid_argument("moments CSV: no rows: " + path);
    return m;
}

void save_samples_csv(const std::string& path, const SampledSignal& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "x,f\n";
    for (size_t i = 0; i < s.values.size(); ++i)
        out << format_double(s.x(i)) << "," << format_double(s.values[i]) << "\n";
}

SampledSignal load_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open samples file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "x,f")
        throw std::invalid_argument("samples CSV must start with header 'x,f': " + path);
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("samples CSV: malformed row '" + line + "'");
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 2) throw std::invalid_argument("samples CSV: need at least two rows");
    SampledSignal s;
    s.a = xs.front();
    s.b = xs.back();
    s.values = std::move(vs);
    return s;
}

}  // namespace mominv
