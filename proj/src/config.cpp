#include "anisokin/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace anisokin {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Binding {
    std::function<void(SimConfig&, const std::string&, int)> set;
};

double parse_double(const std::string& v, int line) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + v + "'", line);
    }
}

int parse_int(const std::string& v, int line) {
    try {
        size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("not an integer: '" + v + "'", line);
    }
}

const std::map<std::string, Binding>& bindings() {
    static const std::map<std::string, Binding> table = [] {
        std::map<std::string, Binding> t;
        auto dbl = [&](const std::string& key, double SimConfig::* field) {
            t[key] = {[field](SimConfig& c, const std::string& v, int ln) {
                c.*field = parse_double(v, ln);
            }};
        };
        auto integer = [&](const std::string& key, int SimConfig::* field) {
            t[key] = {[field](SimConfig& c, const std::string& v, int ln) {
                c.*field = parse_int(v, ln);
            }};
        };
        auto str = [&](const std::string& key, std::string SimConfig::* field) {
            t[key] = {[field](SimConfig& c, const std::string& v, int) { c.*field = v; }};
        };
        integer("grid.nx", &SimConfig::nx);
        integer("grid.ny", &SimConfig::ny);
        dbl("grid.lx", &SimConfig::lx);
        dbl("grid.ly", &SimConfig::ly);
        dbl("time.T", &SimConfig::T);
        dbl("time.dt", &SimConfig::dt);
        dbl("ns.Re", &SimConfig::Re);
        dbl("ns.alpha", &SimConfig::alpha);
        dbl("ns.cfl", &SimConfig::ns_cfl);
        dbl("np.Pe", &SimConfig::Pe);
        dbl("np.beta", &SimConfig::beta);
        dbl("np.dt_safety", &SimConfig::np_dt_safety);
        dbl("poisson.gamma", &SimConfig::gamma);
        dbl("poisson.tol", &SimConfig::poisson_tol);
        integer("poisson.maxit", &SimConfig::poisson_maxit);
        t["poisson.precond"] = {[](SimConfig& c, const std::string& v, int ln) {
            if (v == "none") c.poisson_jacobi = false;
            else if (v == "diag") c.poisson_jacobi = true;
            else throw ConfigError("poisson.precond must be none or diag", ln);
        }};
        dbl("bc.tau", &SimConfig::tau);
        str("bc.xi.waveform", &SimConfig::xi_waveform);
        dbl("bc.xi.amplitude", &SimConfig::xi_amplitude);
        dbl("bc.xi.frequency", &SimConfig::xi_frequency);
        str("bc.xi.profile", &SimConfig::xi_profile);
        str("director.preset", &SimConfig::director_preset);
        dbl("director.lambda", &SimConfig::lambda);
        dbl("director.epsilon", &SimConfig::epsilon);
        str("ic.charges", &SimConfig::ic_charges);
        dbl("ic.background", &SimConfig::ic_background);
        dbl("ic.amplitude", &SimConfig::ic_amplitude);
        dbl("ic.width", &SimConfig::ic_width);
        dbl("reg.kappa", &SimConfig::kappa);
        dbl("reg.c_gate", &SimConfig::c_gate);
        dbl("picard.tol", &SimConfig::picard_tol);
        integer("picard.maxit", &SimConfig::picard_maxit);
        str("out.ledger", &SimConfig::out_ledger);
        str("out.summary", &SimConfig::out_summary);
        str("out.vtk_prefix", &SimConfig::out_vtk_prefix);
        integer("out.snapshot_every", &SimConfig::snapshot_every);
        return t;
    }();
    return table;
}

void validate(const SimConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    };
    if (c.nx < 4 || c.ny < 4) throw ConfigError("grid.nx and grid.ny must be >= 4");
    positive(c.lx, "grid.lx");
    positive(c.ly, "grid.ly");
    positive(c.T, "time.T");
    positive(c.dt, "time.dt");
    positive(c.Re, "ns.Re");
    positive(c.alpha, "ns.alpha");
    positive(c.Pe, "np.Pe");
    positive(c.beta, "np.beta");
    positive(c.gamma, "poisson.gamma");
    positive(c.tau, "bc.tau");
    positive(c.lambda, "director.lambda");
    positive(c.epsilon, "director.epsilon");
    positive(c.poisson_tol, "poisson.tol");
    positive(c.picard_tol, "picard.tol");
    if (!(c.ns_cfl > 0.0 && c.ns_cfl <= 1.0)) throw ConfigError("ns.cfl must be in (0, 1]");
    if (!(c.np_dt_safety > 0.0 && c.np_dt_safety <= 1.0))
        throw ConfigError("np.dt_safety must be in (0, 1]");
    if (c.kappa < 0.0) throw ConfigError("reg.kappa must be nonnegative");
    positive(c.c_gate, "reg.c_gate");
    if (c.picard_maxit < 1) throw ConfigError("picard.maxit must be >= 1");
    if (c.poisson_maxit < 0) throw ConfigError("poisson.maxit must be >= 0");
    if (c.snapshot_every < 0) throw ConfigError("out.snapshot_every must be >= 0");
    if (c.xi_waveform != "constant" && c.xi_waveform != "sinusoid")
        throw ConfigError("bc.xi.waveform must be constant or sinusoid");
    if (c.xi_profile != "uniform" && c.xi_profile != "left_right_antisymmetric")
        throw ConfigError("bc.xi.profile must be uniform or left_right_antisymmetric");
    if (c.ic_charges != "uniform" && c.ic_charges != "gaussian_blob_pair" &&
        c.ic_charges != "separated_slabs")
        throw ConfigError("ic.charges must be uniform, gaussian_blob_pair or separated_slabs");
    if (c.ic_background < 0.0) throw ConfigError("ic.background must be nonnegative");
    if (c.ic_charges != "uniform") {
        positive(c.ic_amplitude, "ic.amplitude");
        positive(c.ic_width, "ic.width");
    }
    // Preset name check happens in preset_director; validate early for parse errors.
    if (c.director_preset != "zero" && c.director_preset != "uniform_x_interior_masked" &&
        c.director_preset != "vortex" && c.director_preset != "quadrant")
        throw ConfigError("director.preset unknown: " + c.director_preset);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    SimConfig cfg;
    std::istringstream is(text);
    std::string raw;
    int ln = 0;
    while (std::getline(is, raw)) {
        ++ln;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", ln);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError("empty value for " + key, ln);
        const auto it = bindings().find(key);
        if (it == bindings().end()) throw ConfigError("unknown key: " + key, ln);
        it->second.set(cfg, value, ln);
    }
    validate(cfg);
    return cfg;
}

SimConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize(const SimConfig& c) {
    std::ostringstream os;
    os << "grid.nx = " << c.nx << "\n";
    os << "grid.ny = " << c.ny << "\n";
    os << "grid.lx = " << fmt(c.lx) << "\n";
    os << "grid.ly = " << fmt(c.ly) << "\n";
    os << "time.T = " << fmt(c.T) << "\n";
    os << "time.dt = " << fmt(c.dt) << "\n";
    os << "ns.Re = " << fmt(c.Re) << "\n";
    os << "ns.alpha = " << fmt(c.alpha) << "\n";
    os << "ns.cfl = " << fmt(c.ns_cfl) << "\n";
    os << "np.Pe = " << fmt(c.Pe) << "\n";
    os << "np.beta = " << fmt(c.beta) << "\n";
    os << "np.dt_safety = " << fmt(c.np_dt_safety) << "\n";
    os << "poisson.gamma = " << fmt(c.gamma) << "\n";
    os << "poisson.tol = " << fmt(c.poisson_tol) << "\n";
    os << "poisson.maxit = " << c.poisson_maxit << "\n";
    os << "poisson.precond = " << (c.poisson_jacobi ? "diag" : "none") << "\n";
    os << "bc.tau = " << fmt(c.tau) << "\n";
    os << "bc.xi.waveform = " << c.xi_waveform << "\n";
    os << "bc.xi.amplitude = " << fmt(c.xi_amplitude) << "\n";
    os << "bc.xi.frequency = " << fmt(c.xi_frequency) << "\n";
    os << "bc.xi.profile = " << c.xi_profile << "\n";
    os << "director.preset = " << c.director_preset << "\n";
    os << "director.lambda = " << fmt(c.lambda) << "\n";
    os << "director.epsilon = " << fmt(c.epsilon) << "\n";
    os << "ic.charges = " << c.ic_charges << "\n";
    os << "ic.background = " << fmt(c.ic_background) << "\n";
    os << "ic.amplitude = " << fmt(c.ic_amplitude) << "\n";
    os << "ic.width = " << fmt(c.ic_width) << "\n";
    os << "reg.kappa = " << fmt(c.kappa) << "\n";
    os << "reg.c_gate = " << fmt(c.c_gate) << "\n";
    os << "picard.tol = " << fmt(c.picard_tol) << "\n";
    os << "picard.maxit = " << c.picard_maxit << "\n";
    os << "out.ledger = " << c.out_ledger << "\n";
    os << "out.summary = " << c.out_summary << "\n";
    if (!c.out_vtk_prefix.empty()) os << "out.vtk_prefix = " << c.out_vtk_prefix << "\n";
    os << "out.snapshot_every = " << c.snapshot_every << "\n";
    return os.str();
}

BoundaryTrace xi_trace(const Grid& g, const SimConfig& cfg, double t) {
    double w = cfg.xi_amplitude;
    if (cfg.xi_waveform == "sinusoid") w *= std::sin(kTwoPi * cfg.xi_frequency * t);
    BoundaryTrace tr(g);
    if (cfg.xi_profile == "uniform") {
        tr.bottom.setConstant(w);
        tr.top.setConstant(w);
        tr.left.setConstant(w);
        tr.right.setConstant(w);
    } else {  // left_right_antisymmetric
        tr.left.setConstant(w);
        tr.right.setConstant(-w);
    }
    return tr;
}

double gate_value(double kappa, double c_gate, const DirectorField& d) {
    const Grid& g = d.grid;
    double dmax = d.max_norm();
    double lmax = 0.0;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const double lx_ = (d.dx(i + 1, j) - 2.0 * d.dx(i, j) + d.dx(i - 1, j)) /
                                   (g.hx * g.hx) +
                               (d.dx(i, j + 1) - 2.0 * d.dx(i, j) + d.dx(i, j - 1)) /
                                   (g.hy * g.hy);
            const double ly_ = (d.dy(i + 1, j) - 2.0 * d.dy(i, j) + d.dy(i - 1, j)) /
                                   (g.hx * g.hx) +
                               (d.dy(i, j + 1) - 2.0 * d.dy(i, j) + d.dy(i, j - 1)) /
                                   (g.hy * g.hy);
            lmax = std::max(lmax, std::hypot(lx_, ly_));
        }
    const double proxy = dmax + lmax;
    return kappa * c_gate * (1.0 + proxy * proxy);
}

bool gate_admits(double kappa, double c_gate, const DirectorField& d) {
    if (kappa == 0.0) return true;
    return gate_value(kappa, c_gate, d) <= 1.0 / 32.0;
}

}  // namespace anisokin
