#include <CLI11.hpp>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "anisokin/config.hpp"
#include "anisokin/output.hpp"
#include "anisokin/regularizers.hpp"
#include "anisokin/simulation.hpp"
#include "anisokin/surface.hpp"

namespace {

using namespace anisokin;

int cmd_run(const std::string& config_path) {
    const SimConfig cfg = parse_config(config_path);
    const RunResult result = run(cfg);
    std::printf("completed %ld steps to t=%.6g\n", result.summary.steps, result.state.t);
    std::printf("  max |rho|      %.6e\n", result.summary.max_rho);
    std::printf("  mass drift     %.6e\n", result.summary.mass_drift);
    std::printf("  min c          %.6e\n", result.summary.min_c);
    std::printf("  wall time      %.2f s\n", result.summary.wall_time);
    return 0;
}

int cmd_mms_poisson(const std::vector<int>& grids, double lambda, double eps, double tau) {
    std::printf("%8s %14s %10s\n", "n", "l2_error", "order");
    double prev = 0.0;
    int prev_n = 0;
    for (int n : grids) {
        const double err = mms::l2_error(n, lambda, eps, tau, 1e-12);
        if (prev_n > 0) {
            const double order = std::log(prev / err) / std::log(double(n) / prev_n);
            std::printf("%8d %14.6e %10.3f\n", n, err, order);
        } else {
            std::printf("%8d %14.6e %10s\n", n, err, "-");
        }
        prev = err;
        prev_n = n;
    }
    return 0;
}

int cmd_mms_np(int n, double dt, int steps, double Pe) {
    // Anisotropic diffusion of the Neumann eigenmode cos(pi x): the director
    // (0,1) on the interior leaves the x-direction isotropic, so the decay
    // rate must match pi^2/Pe.
    const Grid g(n, n, 1.0, 1.0);
    DirectorField df(g);
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) df.dy(i, j) = 1.0;
    const TensorField lt = tensor_from_director(df, df.lambda);
    const ScalarField mode = ScalarField::sample(
        g, [](double x, double) { return std::cos(3.14159265358979324 * x); });
    ChargePair pair(g);
    pair.c_plus.values = 1.0 + 0.5 * mode.values;
    pair.c_minus.values = pair.c_plus.values;
    const VectorFieldMAC vel(g);
    const ScalarField psi(g);
    NpWorkspace ws;
    auto amplitude = [&](const ChargePair& p) {
        return (p.c_plus.values * mode.values).sum() / mode.values.square().sum();
    };
    const double a0 = amplitude(pair);
    for (int s = 0; s < steps; ++s)
        pair = np_step(pair, vel, psi, lt, dt, Pe, 1.0, 0.9, &ws);
    const double aN = amplitude(pair);
    const double rate = -std::log(aN / a0) / (steps * dt);
    const double exact = 3.14159265358979324 * 3.14159265358979324 / Pe;
    std::printf("measured decay rate %.8f, exact pi^2/Pe = %.8f, rel. deviation %.3e\n", rate,
                exact, std::abs(rate - exact) / exact);
    return 0;
}

int cmd_audit(const std::string& ledger_path, double max_rho) {
    const EnergyLedger ledger = read_ledger_csv(ledger_path);
    double worst = 0.0;
    for (int k = 0; k < static_cast<int>(ledger.rows.size()); ++k) {
        const double rho = audit_energy_inequality(ledger, k);
        worst = std::max(worst, rho);
        if (std::abs(rho - ledger.rows[k].residual) > 1e-9 + 1e-6 * std::abs(rho))
            std::fprintf(stderr, "warning: stored residual deviates at row %d\n", k);
    }
    std::printf("rows %zu, max signed residual %.6e\n", ledger.rows.size(), worst);
    std::printf("final mass (+,-) = (%.12g, %.12g)\n", ledger.rows.back().mass_plus,
                ledger.rows.back().mass_minus);
    double minc = std::numeric_limits<double>::infinity();
    for (const auto& r : ledger.rows) minc = std::min({minc, r.min_plus, r.min_minus});
    std::printf("global min c %.6e\n", minc);
    if (max_rho > 0.0 && worst > max_rho) {
        std::fprintf(stderr, "audit: residual bound %g exceeded\n", max_rho);
        return 4;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& kappas,
              const std::string& out_csv) {
    const SimConfig cfg = parse_config(config_path);
    const SweepReport report = kappa_sweep(cfg, kappas);
    std::ostringstream os;
    report.write_csv(os);
    if (out_csv.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out_csv);
        f << os.str();
    }
    return 0;
}

int cmd_resolvent_suite(int n, const std::string& kind, const std::string& preset,
                        const std::string& out_csv, int trials) {
    const Grid g(n, n, 1.0, 1.0);
    DenseOperator op;
    if (kind == "stokes") {
        op = build_dense_stokes(g);
    } else {
        const DirectorField df = preset_director(preset, g);
        op = build_dense_robin(g, tensor_from_director(df, df.epsilon), 1.0);
    }
    const ResolventReport report = lemma31_suite(op, trials);
    std::ostringstream os;
    report.write_csv(os);
    if (out_csv.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out_csv);
        f << os.str();
    }
    return 0;
}

int cmd_surface_check(const std::string& curve_name, int samples, const std::string& mode_name,
                      const std::string& out_csv) {
    const DiffMode mode = mode_name == "central4" ? DiffMode::central4 : DiffMode::spectral;
    ParametricCurve curve = curve_name == "ellipse" ? ellipse_curve(samples, 2.0, 1.0, mode)
                                                    : circle_curve(samples, 1.0, mode);
    std::ostringstream os;
    os << "check,residual\n";

    const SurfaceScalar kappa = curvature(curve);
    if (curve_name == "circle") {
        os << "curvature_minus_one," << (kappa - 1.0).abs().maxCoeff() << "\n";
    } else {
        // kappa(0) = a b / (a^2 sin^2 + b^2 cos^2)^{3/2} = a/b^2 at theta = 0.
        os << "curvature_theta0_minus_exact," << std::abs(kappa(0) - 2.0) << "\n";
    }

    // Tangential divergence theorem with v = h(theta) tau/|tau|.
    SurfaceVector vt(curve.m, 2);
    const Eigen::ArrayXd h = (2.0 * curve.theta).sin() + 0.5 * curve.theta.cos();
    const Eigen::ArrayXd nrm = curve.metric.sqrt();
    vt.col(0) = h * curve.tangent.col(0) / nrm;
    vt.col(1) = h * curve.tangent.col(1) / nrm;
    os << "tangential_divergence_theorem,"
       << std::abs(line_integral(curve, surface_divergence(curve, vt))) << "\n";

    // Integration by parts with a non-tangential field, with and without the
    // curvature term.
    SurfaceScalar f(curve.m);
    SurfaceVector v(curve.m, 2);
    for (int k = 0; k < curve.m; ++k) {
        const double x = curve.pos(k, 0), y = curve.pos(k, 1);
        f(k) = x * x + y;
        v(k, 0) = x * x - y;
        v(k, 1) = x + y * y;
    }
    os << "ibp_with_curvature," << std::abs(ibp_residual(curve, f, v, true)) << "\n";
    os << "ibp_without_curvature," << std::abs(ibp_residual(curve, f, v, false)) << "\n";

    // Projection identity for F = x^2 + y.
    SurfaceVector grad_f = surface_gradient(curve, f);
    double proj = 0.0;
    for (int k = 0; k < curve.m; ++k) {
        const double x = curve.pos(k, 0);
        const Eigen::Vector2d bulk(2.0 * x, 1.0);
        const Eigen::Vector2d n(curve.normal(k, 0), curve.normal(k, 1));
        const Eigen::Vector2d tang = bulk - (bulk.dot(n)) * n;
        proj = std::max(proj, (Eigen::Vector2d(grad_f(k, 0), grad_f(k, 1)) - tang).norm());
    }
    os << "projection_identity," << proj << "\n";

    if (out_csv.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream fo(out_csv);
        fo << os.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisokin: anisotropic electrokinetic flow laboratory"};
    app.require_subcommand(1);

    std::string config_path, ledger_path, out_csv;
    std::vector<double> kappas = {1e-2, 1e-3, 1e-4};
    std::vector<int> grids = {32, 64, 128};
    double lambda = 0.5, eps = 0.5, tau = 1.0, max_rho = 0.0, Pe = 1.0, dt = 1e-3;
    int n = 8, samples = 256, trials = 16, steps = 100, np_n = 64;
    std::string kind = "robin", preset = "zero", curve = "circle", mode = "spectral",
                mms_what = "poisson";

    auto* c_run = app.add_subcommand("run", "run a coupled simulation");
    c_run->add_option("config", config_path, "config file")->required();

    auto* c_mms = app.add_subcommand("mms", "manufactured-solution studies");
    c_mms->add_option("which", mms_what, "poisson | np")->required();
    c_mms->add_option("--grids", grids, "grid sizes (poisson)");
    c_mms->add_option("--lambda", lambda);
    c_mms->add_option("--epsilon", eps);
    c_mms->add_option("--tau", tau);
    c_mms->add_option("--n", np_n, "grid size (np)");
    c_mms->add_option("--dt", dt);
    c_mms->add_option("--steps", steps);
    c_mms->add_option("--Pe", Pe);

    auto* c_audit = app.add_subcommand("audit", "re-audit a ledger CSV");
    c_audit->add_option("ledger", ledger_path)->required();
    c_audit->add_option("--max-rho", max_rho, "fail (exit 4) above this residual");

    auto* c_sweep = app.add_subcommand("sweep", "kappa -> 0 regularization sweep");
    c_sweep->add_option("config", config_path)->required();
    c_sweep->add_option("--kappas", kappas, "kappa values");
    c_sweep->add_option("--out", out_csv, "CSV output path");

    auto* c_res = app.add_subcommand("resolvent-suite", "regularization-operator property suite");
    c_res->add_option("--grid", n, "cells per side");
    c_res->add_option("--kind", kind, "stokes | robin");
    c_res->add_option("--preset", preset, "director preset (robin kind)");
    c_res->add_option("--trials", trials);
    c_res->add_option("--out", out_csv, "CSV output path");

    auto* c_surf = app.add_subcommand("surface-check", "boundary-calculus identity checks");
    c_surf->add_option("--curve", curve, "circle | ellipse");
    c_surf->add_option("--samples", samples);
    c_surf->add_option("--mode", mode, "spectral | central4");
    c_surf->add_option("--out", out_csv, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_run) return cmd_run(config_path);
        if (*c_mms)
            return mms_what == "poisson" ? cmd_mms_poisson(grids, lambda, eps, tau)
                                         : cmd_mms_np(np_n, dt, steps, Pe);
        if (*c_audit) return cmd_audit(ledger_path, max_rho);
        if (*c_sweep) return cmd_sweep(config_path, kappas, out_csv);
        if (*c_res) return cmd_resolvent_suite(n, kind, preset, out_csv, trials);
        if (*c_surf) return cmd_surface_check(curve, samples, mode, out_csv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error%s: %s\n",
                     e.line ? (" (line " + std::to_string(e.line) + ")").c_str() : "", e.what());
        return 2;
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const StepError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const InvariantError& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
