#include "anisokin/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anisokin/simulation.hpp"

namespace anisokin {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_vtk(const std::string& path, const SimulationState& state) {
    std::ofstream os(path);
    if (!os) throw StructuralError("cannot open VTK output: " + path);
    const Grid& g = state.psi.grid;
    os << "# vtk DataFile Version 3.0\n";
    os << "anisokin snapshot t=" << fmt(state.t) << "\n";
    os << "ASCII\n";
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n";
    os << "ORIGIN " << fmt(0.5 * g.hx) << ' ' << fmt(0.5 * g.hy) << " 0\n";
    os << "SPACING " << fmt(g.hx) << ' ' << fmt(g.hy) << " 1\n";
    os << "POINT_DATA " << g.cells() << "\n";

    auto scalar = [&](const char* name, const Eigen::ArrayXXd& v) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) os << fmt(v(i, j)) << "\n";
    };
    scalar("c_plus", state.charges.c_plus.values);
    scalar("c_minus", state.charges.c_minus.values);
    scalar("psi", state.psi.values);
    scalar("pressure", state.flow.p.values);

    os << "VECTORS velocity double\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double uc = 0.5 * (state.flow.v.u(i, j) + state.flow.v.u(i + 1, j));
            const double vc = 0.5 * (state.flow.v.v(i, j) + state.flow.v.v(i, j + 1));
            os << fmt(uc) << ' ' << fmt(vc) << " 0\n";
        }
}

std::string vtk_snapshot_path(const std::string& prefix, int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%06d.vtk", step);
    return prefix + buf;
}

void write_ledger_csv(std::ostream& os, const EnergyLedger& ledger) {
    os << EnergyLedger::csv_header() << "\n";
    for (const EnergyRow& r : ledger.rows) {
        os << fmt(r.t) << ',' << fmt(r.kinetic) << ',' << fmt(r.entropy) << ',' << fmt(r.field)
           << ',' << fmt(r.boundary) << ',' << fmt(r.kappa_term) << ',' << fmt(r.dissipation)
           << ',' << fmt(r.boundary_work) << ',' << fmt(r.mass_plus) << ',' << fmt(r.mass_minus)
           << ',' << fmt(r.min_plus) << ',' << fmt(r.min_minus) << ',' << fmt(r.residual) << ','
           << fmt(r.hess_psi) << ',' << fmt(r.grad_lap_psi) << ',' << fmt(r.third_psi) << ','
           << fmt(r.grad_sqrt_c) << "\n";
    }
}

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger) {
    std::ofstream os(path);
    if (!os) throw StructuralError("cannot open ledger output: " + path);
    write_ledger_csv(os, ledger);
}

void write_summary_json(const std::string& path, const RunSummary& summary) {
    nlohmann::json j;
    j["steps"] = summary.steps;
    j["max_rho"] = summary.max_rho;
    j["mass_drift"] = summary.mass_drift;
    j["min_c"] = summary.min_c;
    j["wall_time"] = summary.wall_time;
    std::ofstream os(path);
    if (!os) throw StructuralError("cannot open summary output: " + path);
    os << j.dump(2) << "\n";
}

EnergyLedger read_ledger_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw StructuralError("cannot open ledger: " + path);
    std::string line;
    if (!std::getline(is, line)) throw StructuralError("ledger is empty: " + path);
    if (line != EnergyLedger::csv_header())
        throw StructuralError("ledger header mismatch in " + path);
    EnergyLedger ledger;
    int ln = 1;
    while (std::getline(is, line)) {
        ++ln;
        if (line.empty()) continue;
        std::istringstream ss(line);
        double v[17];
        char comma;
        for (int k = 0; k < 17; ++k) {
            if (!(ss >> v[k])) throw StructuralError("ledger parse error at line " +
                                                     std::to_string(ln));
            if (k < 16 && !(ss >> comma))
                throw StructuralError("ledger parse error at line " + std::to_string(ln));
        }
        EnergyRow r;
        r.t = v[0];
        r.kinetic = v[1];
        r.entropy = v[2];
        r.field = v[3];
        r.boundary = v[4];
        r.kappa_term = v[5];
        r.dissipation = v[6];
        r.boundary_work = v[7];
        r.mass_plus = v[8];
        r.mass_minus = v[9];
        r.min_plus = v[10];
        r.min_minus = v[11];
        r.residual = v[12];
        r.hess_psi = v[13];
        r.grad_lap_psi = v[14];
        r.third_psi = v[15];
        r.grad_sqrt_c = v[16];
        ledger.append(r);
    }
    return ledger;
}

}  // namespace anisokin
