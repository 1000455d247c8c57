#include "fsde/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace fsde {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double to_real(const std::string& origin, int line, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        bail(origin, line, "key '" + key + "': not a real number: '" + v + "'");
    }
}

int to_int(const std::string& origin, int line, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        bail(origin, line, "key '" + key + "': not an integer: '" + v + "'");
    }
}

} // namespace

ModelSpec parse_config(std::istream& in, const std::string& origin) {
    ModelSpec spec;
    std::map<std::string, bool> seen;
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) bail(origin, ln, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) bail(origin, ln, "empty key or value");
        if (seen[key]) bail(origin, ln, "duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "alpha") spec.alpha = to_real(origin, ln, key, val);
        else if (key == "beta") spec.beta = to_real(origin, ln, key, val);
        else if (key == "gamma") spec.gamma = to_real(origin, ln, key, val);
        else if (key == "L") spec.L = to_real(origin, ln, key, val);
        else if (key == "K") spec.K = to_int(origin, ln, key, val);
        else if (key == "T") spec.T = to_real(origin, ln, key, val);
        else if (key == "q_kind") {
            if (val == "white") spec.q.kind = QSpectrum::Kind::White;
            else if (val == "power_law") spec.q.kind = QSpectrum::Kind::PowerLaw;
            else bail(origin, ln, "q_kind must be 'white' or 'power_law'");
        } else if (key == "q_exponent") spec.q.exponent = to_real(origin, ln, key, val);
        else if (key == "f_kind") {
            if (val == "zero") spec.f.kind = Nonlinearity::Kind::Zero;
            else if (val == "linear") spec.f.kind = Nonlinearity::Kind::LinearDiagonal;
            else if (val == "sin") {
                spec.f.kind = Nonlinearity::Kind::Nemytskii;
                spec.f.f = Nonlinearity::Pointwise::SinScaled;
            } else if (val == "tanh") {
                spec.f.kind = Nonlinearity::Kind::Nemytskii;
                spec.f.f = Nonlinearity::Pointwise::TanhScaled;
            } else if (val == "affine") {
                spec.f.kind = Nonlinearity::Kind::Nemytskii;
                spec.f.f = Nonlinearity::Pointwise::Affine;
            } else bail(origin, ln, "f_kind must be zero|linear|sin|tanh|affine");
        } else if (key == "f_scale") spec.f.c = to_real(origin, ln, key, val);
        else if (key == "f_c0") spec.f.c0 = to_real(origin, ln, key, val);
        else if (key == "x0_kind") {
            if (val == "zero") spec.x0.kind = InitialDatum::Kind::Zero;
            else if (val == "mode") spec.x0.kind = InitialDatum::Kind::Mode;
            else if (val == "smooth_decay") spec.x0.kind = InitialDatum::Kind::SmoothDecay;
            else bail(origin, ln, "x0_kind must be zero|mode|smooth_decay");
        } else if (key == "x0_p") spec.x0.p = to_real(origin, ln, key, val);
        else if (key == "x0_k0") spec.x0.k0 = to_int(origin, ln, key, val);
        else if (key == "x0_amp") spec.x0.amplitude = to_real(origin, ln, key, val);
        else if (key == "r_target") spec.r_target = to_real(origin, ln, key, val);
        else if (key == "epsilon0") spec.epsilon0 = to_real(origin, ln, key, val);
        else if (key == "N_x") spec.N_x = to_int(origin, ln, key, val);
        else bail(origin, ln, "unknown key '" + key + "'");
    }
    return spec;
}

ModelSpec parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in, path);
}

std::string render_config(const ModelSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha = " << spec.alpha << "\n";
    os << "beta = " << spec.beta << "\n";
    os << "gamma = " << spec.gamma << "\n";
    os << "L = " << spec.L << "\n";
    os << "K = " << spec.K << "\n";
    os << "T = " << spec.T << "\n";
    os << "q_kind = " << (spec.q.kind == QSpectrum::Kind::White ? "white" : "power_law") << "\n";
    if (spec.q.kind == QSpectrum::Kind::PowerLaw) os << "q_exponent = " << spec.q.exponent << "\n";
    switch (spec.f.kind) {
        case Nonlinearity::Kind::Zero: os << "f_kind = zero\n"; break;
        case Nonlinearity::Kind::LinearDiagonal:
            os << "f_kind = linear\nf_scale = " << spec.f.c << "\n";
            break;
        case Nonlinearity::Kind::Nemytskii:
            switch (spec.f.f) {
                case Nonlinearity::Pointwise::SinScaled: os << "f_kind = sin\n"; break;
                case Nonlinearity::Pointwise::TanhScaled: os << "f_kind = tanh\n"; break;
                case Nonlinearity::Pointwise::Affine:
                    os << "f_kind = affine\nf_c0 = " << spec.f.c0 << "\n";
                    break;
            }
            os << "f_scale = " << spec.f.c << "\n";
            break;
    }
    switch (spec.x0.kind) {
        case InitialDatum::Kind::Zero: os << "x0_kind = zero\n"; break;
        case InitialDatum::Kind::Mode:
            os << "x0_kind = mode\nx0_k0 = " << spec.x0.k0 << "\nx0_amp = " << spec.x0.amplitude
               << "\n";
            break;
        case InitialDatum::Kind::SmoothDecay:
            os << "x0_kind = smooth_decay\n";
            if (spec.x0.p > 0.0) os << "x0_p = " << spec.x0.p << "\n";
            break;
    }
    if (spec.r_target > 0.0) os << "r_target = " << spec.r_target << "\n";
    os << "epsilon0 = " << spec.epsilon0 << "\n";
    if (spec.N_x > 0) os << "N_x = " << spec.N_x << "\n";
    return os.str();
}

} // namespace fsde
