#include "anisokin/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "anisokin/output.hpp"

namespace anisokin {

SimCaches::SimCaches(const Grid& g, const TensorField& eps_tensor, const SimConfig& cfg)
    : op(g, eps_tensor, cfg.tau), ns(g, cfg.Re, cfg.dt), kappa(cfg.kappa) {
    const Eigen::SparseMatrix<double> A = op.matrix();
    psi_solver.compute(A);
    if (psi_solver.info() != Eigen::Success)
        throw ConvergenceError("sim caches: Robin operator factorization failed", 0.0, 0);
    if (kappa > 0.0) {
        Eigen::SparseMatrix<double> M = A * kappa;
        const double vol = g.hx * g.hy;
        for (int c = 0; c < g.cells(); ++c) M.coeffRef(c, c) += vol;
        skappa_solver = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
        skappa_solver->compute(M);
        if (skappa_solver->info() != Eigen::Success)
            throw ConvergenceError("sim caches: S_kappa factorization failed", 0.0, 0);
    }
}

ScalarField SimCaches::solve_psi(const ScalarField& phi, double gamma,
                                 const BoundaryTrace& xi) const {
    return op.wrap(psi_solver.solve(op.rhs(phi, gamma, xi)));
}

ScalarField SimCaches::apply_skappa(const ScalarField& f) const {
    if (kappa == 0.0) return f;
    const Grid& g = op.grid();
    return op.wrap(skappa_solver->solve((g.hx * g.hy) * op.flatten(f)));
}

namespace {

ChargePair initial_charges(const SimConfig& cfg, const Grid& g) {
    ChargePair pair(g);
    if (cfg.ic_charges == "uniform") {
        pair.c_plus.values.setConstant(cfg.ic_background);
        pair.c_minus.values.setConstant(cfg.ic_background);
    } else if (cfg.ic_charges == "gaussian_blob_pair") {
        const double x1 = 0.35 * g.lx, x2 = 0.65 * g.lx, yc = 0.5 * g.ly;
        const double w2 = 2.0 * cfg.ic_width * cfg.ic_width;
        pair.c_plus = ScalarField::sample(g, [&](double x, double y) {
            const double r2 = (x - x1) * (x - x1) + (y - yc) * (y - yc);
            return cfg.ic_background + cfg.ic_amplitude * std::exp(-r2 / w2);
        });
        pair.c_minus = ScalarField::sample(g, [&](double x, double y) {
            const double r2 = (x - x2) * (x - x2) + (y - yc) * (y - yc);
            return cfg.ic_background + cfg.ic_amplitude * std::exp(-r2 / w2);
        });
    } else {  // separated_slabs
        pair.c_plus = ScalarField::sample(g, [&](double x, double) {
            return cfg.ic_background + (x < 0.5 * g.lx ? cfg.ic_amplitude : 0.0);
        });
        pair.c_minus = ScalarField::sample(g, [&](double x, double) {
            return cfg.ic_background + (x >= 0.5 * g.lx ? cfg.ic_amplitude : 0.0);
        });
    }
    return pair;
}

ScalarField charge_diff(const ChargePair& pair) {
    ScalarField d(pair.c_plus.grid);
    d.values = pair.c_plus.values - pair.c_minus.values;
    return d;
}

double rel_max_change(const Eigen::ArrayXXd& now, const Eigen::ArrayXXd& before) {
    const double scale = 1.0 + before.abs().maxCoeff();
    return (now - before).abs().maxCoeff() / scale;
}

SimulationState attempt_step(const SimulationState& state, const SimConfig& cfg,
                             SimCaches& caches, double dt, StepReport* report) {
    const Grid& g = state.psi.grid;
    const double t_next = state.t + dt;
    const BoundaryTrace xi_n = xi_trace(g, cfg, t_next);

    ChargePair c_prev = state.charges;
    ScalarField psi_prev = state.psi;
    ChargePair c_new;
    ScalarField psi_new, phi_new;

    double delta_prev = -1.0, contraction = 0.0;
    bool converged = false;
    int iterations = 0;
    for (int it = 1; it <= cfg.picard_maxit; ++it) {
        iterations = it;
        phi_new = caches.apply_skappa(charge_diff(c_prev));
        psi_new = caches.solve_psi(phi_new, cfg.gamma, xi_n);
        c_new = np_step(state.charges, state.flow.v, psi_new, state.lambda_tensor, dt, cfg.Pe,
                        cfg.beta, cfg.np_dt_safety, &caches.np_ws);
        const double delta = std::max({rel_max_change(c_new.c_plus.values, c_prev.c_plus.values),
                                       rel_max_change(c_new.c_minus.values, c_prev.c_minus.values),
                                       rel_max_change(psi_new.values, psi_prev.values)});
        if (delta_prev > 0.0) contraction = delta / delta_prev;
        c_prev = c_new;
        psi_prev = psi_new;
        if (delta <= cfg.picard_tol) {
            converged = true;
            break;
        }
        delta_prev = delta;
    }
    if (report) {
        report->picard_iterations = iterations;
        report->last_contraction = contraction;
        report->dt_used = dt;
    }
    if (!converged)
        throw StepError("picard iteration did not converge (last contraction factor " +
                            std::to_string(contraction) + ")",
                        0.0);

    // Restore the phi/psi consistency invariant with the converged charges.
    phi_new = caches.apply_skappa(charge_diff(c_new));
    psi_new = caches.solve_psi(phi_new, cfg.gamma, xi_n);

    FlowState flow_new;
    if (dt == cfg.dt) {
        flow_new = ns_step(state.flow, c_new.c_plus, c_new.c_minus, psi_new, dt, caches.ns,
                           cfg.ns_cfl);
    } else {
        const NsCache local(g, cfg.Re, dt);
        flow_new = ns_step(state.flow, c_new.c_plus, c_new.c_minus, psi_new, dt, local,
                           cfg.ns_cfl);
    }

    SimulationState out = state;
    out.t = t_next;
    out.flow = std::move(flow_new);
    out.charges = std::move(c_new);
    out.psi = std::move(psi_new);
    out.phi = std::move(phi_new);
    return out;
}

}  // namespace

SimulationState initial_state(const SimConfig& cfg, SimCaches& caches) {
    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    SimulationState s;
    s.t = 0.0;
    s.consts = cfg.constants();
    s.director = preset_director(cfg.director_preset, g, cfg.lambda, cfg.epsilon);
    s.lambda_tensor = tensor_from_director(s.director, cfg.lambda);
    s.eps_tensor = tensor_from_director(s.director, cfg.epsilon);
    s.flow = FlowState(g, cfg.Re, cfg.alpha);
    s.charges = initial_charges(cfg, g);
    s.phi = caches.apply_skappa(charge_diff(s.charges));
    s.psi = caches.solve_psi(s.phi, cfg.gamma, xi_trace(g, cfg, 0.0));
    return s;
}

SimulationState coupled_step(const SimulationState& state, const SimConfig& cfg,
                             SimCaches& caches, double dt, StepReport* report) {
    double dt_try = dt;
    for (int attempt = 0;; ++attempt) {
        try {
            return attempt_step(state, cfg, caches, dt_try, report);
        } catch (const StepError&) {
            if (attempt >= 4) throw;
            dt_try *= 0.5;
        }
    }
}

namespace {

EnergyRow measure_row(const SimulationState& s, const RobinOperator& op, const BoundaryTrace& xi,
                      double work_rate) {
    EnergyRow r;
    r.t = s.t;
    const EnergyComponents e = energy(s, op, xi);
    r.kinetic = e.kinetic;
    r.entropy = e.entropy;
    r.field = e.field;
    r.boundary = e.boundary;
    r.kappa_term = e.kappa_term;
    r.dissipation = dissipation(s);
    r.boundary_work = work_rate;
    const auto mass = total_mass(s.charges);
    r.mass_plus = mass.first;
    r.mass_minus = mass.second;
    const auto mins = min_value_audit(s.charges);
    r.min_plus = mins.first;
    r.min_minus = mins.second;
    r.hess_psi = hessian_norm2(s.psi);
    r.grad_lap_psi = grad_laplacian_norm2(s.psi);
    r.third_psi = third_derivative_norm2(s.psi);
    r.grad_sqrt_c = grad_sqrt_norm2(s.charges);
    return r;
}

void log_negative_excursion(const ChargePair& pair, int step) {
    for (const auto& [field, name] :
         {std::pair<const ScalarField*, const char*>{&pair.c_plus, "c_plus"},
          std::pair<const ScalarField*, const char*>{&pair.c_minus, "c_minus"}}) {
        if (field->min() >= 0.0) continue;
        int bi = 0, bj = 0;
        double best = 0.0;
        for (int j = 0; j < field->grid.ny; ++j)
            for (int i = 0; i < field->grid.nx; ++i)
                if (field->values(i, j) < best) {
                    best = field->values(i, j);
                    bi = i;
                    bj = j;
                }
        std::fprintf(stderr, "anisokin: negative excursion %s=%.3e at cell (%d,%d), step %d\n",
                     name, best, bi, bj, step);
    }
}

}  // namespace

RunResult run(const SimConfig& cfg, const RunObserver& observer) {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    const DirectorField director = preset_director(cfg.director_preset, g, cfg.lambda, cfg.epsilon);
    if (!gate_admits(cfg.kappa, cfg.c_gate, director))
        throw ConfigError("reg.kappa refused by the smallness gate (value " +
                          std::to_string(gate_value(cfg.kappa, cfg.c_gate, director)) +
                          " > 1/32)");

    RunResult result;
    SimCaches caches(g, tensor_from_director(director, cfg.epsilon), cfg);
    result.state = initial_state(cfg, caches);

    auto flush_outputs = [&](bool aborted) {
        if (!cfg.out_ledger.empty()) write_ledger_csv(cfg.out_ledger, result.ledger);
        if (aborted) {
            const std::string prefix =
                cfg.out_vtk_prefix.empty() ? std::string("anisokin") : cfg.out_vtk_prefix;
            write_vtk(prefix + "_abort.vtk", result.state);
        }
    };

    try {
        result.ledger.append(
            measure_row(result.state, caches.op, xi_trace(g, cfg, 0.0), 0.0));
        if (observer) observer(result.state, 0);
        if (cfg.snapshot_every > 0 && !cfg.out_vtk_prefix.empty())
            write_vtk(vtk_snapshot_path(cfg.out_vtk_prefix, 0), result.state);

        const auto& first = result.ledger.rows[0];
        const double mass0_p = first.mass_plus, mass0_m = first.mass_minus;
        const double e0_base = first.kinetic + first.entropy + first.field + first.boundary;
        result.summary.min_c = std::min(first.min_plus, first.min_minus);

        double acc_diss = 0.0, acc_work = 0.0;
        int step = 0;
        while (result.state.t < cfg.T - 1e-12) {
            const double dt_eff = std::min(cfg.dt, cfg.T - result.state.t);
            const BoundaryTrace xi_prev = xi_trace(g, cfg, result.state.t);
            const BoundaryTrace psi_tr = caches.op.boundary_trace(result.state.psi, xi_prev);

            StepReport rep;
            result.state = coupled_step(result.state, cfg, caches, dt_eff, &rep);
            ++step;

            const BoundaryTrace xi_now = xi_trace(g, cfg, result.state.t);
            BoundaryTrace dxi(g);
            dxi.bottom = psi_tr.bottom * (xi_now.bottom - xi_prev.bottom);
            dxi.top = psi_tr.top * (xi_now.top - xi_prev.top);
            dxi.left = psi_tr.left * (xi_now.left - xi_prev.left);
            dxi.right = psi_tr.right * (xi_now.right - xi_prev.right);
            const double work_rate = boundary_integral(g, dxi) / rep.dt_used;

            EnergyRow row = measure_row(result.state, caches.op, xi_now, work_rate);
            const double dt_row = row.t - result.ledger.rows.back().t;
            acc_diss += dt_row * row.dissipation;
            acc_work += dt_row * row.boundary_work;
            row.residual =
                (row.kinetic + row.entropy + row.field + row.boundary) - e0_base + acc_diss -
                acc_work;
            result.ledger.append(row);
            if (observer) observer(result.state, step);

            const double min_now = std::min(row.min_plus, row.min_minus);
            if (min_now < 0.0) log_negative_excursion(result.state.charges, step);
            if (min_now < -1e-12)
                throw InvariantError("positivity lost: min c = " + std::to_string(min_now));
            const double div_max = divergence_mac(result.state.flow.v).max_abs();
            if (div_max > 1e-8)
                throw InvariantError("projection failed: max |div v| = " +
                                     std::to_string(div_max));

            result.summary.max_rho = std::max(result.summary.max_rho, std::abs(row.residual));
            result.summary.mass_drift = std::max(
                result.summary.mass_drift,
                std::max(std::abs(row.mass_plus - mass0_p) / std::max(1e-300, std::abs(mass0_p)),
                         std::abs(row.mass_minus - mass0_m) /
                             std::max(1e-300, std::abs(mass0_m))));
            result.summary.min_c = std::min(result.summary.min_c, min_now);

            if (cfg.snapshot_every > 0 && !cfg.out_vtk_prefix.empty() &&
                step % cfg.snapshot_every == 0)
                write_vtk(vtk_snapshot_path(cfg.out_vtk_prefix, step), result.state);
        }
        result.summary.steps = step;
    } catch (...) {
        flush_outputs(true);
        throw;
    }

    result.summary.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    flush_outputs(false);
    if (!cfg.out_summary.empty()) write_summary_json(cfg.out_summary, result.summary);
    return result;
}

void SweepReport::write_csv(std::ostream& os) const {
    os << "kappa,dist_v,dist_c_plus,dist_c_minus,dist_psi,total\n";
    for (const auto& r : rows)
        os << r.kappa << ',' << r.dist_v << ',' << r.dist_c_plus << ',' << r.dist_c_minus << ','
           << r.dist_psi << ',' << r.total() << '\n';
}

namespace {

struct FieldSnapshot {
    double t;
    Eigen::ArrayXXd u, v, cp, cm, psi;
};

double face_l2_sq(const Eigen::ArrayXXd& du, const Eigen::ArrayXXd& dv, const Grid& g) {
    return (du.square().sum() + dv.square().sum()) * g.hx * g.hy;
}

}  // namespace

SweepReport kappa_sweep(const SimConfig& cfg, const std::vector<double>& kappas) {
    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    const DirectorField director = preset_director(cfg.director_preset, g, cfg.lambda, cfg.epsilon);
    for (double k : kappas)
        if (!gate_admits(k, cfg.c_gate, director))
            throw ConfigError("kappa " + std::to_string(k) +
                              " refused by the smallness gate (value " +
                              std::to_string(gate_value(k, cfg.c_gate, director)) + " > 1/32)");

    SimConfig base = cfg;
    base.kappa = 0.0;
    base.out_ledger.clear();
    base.out_summary.clear();
    base.out_vtk_prefix.clear();
    base.snapshot_every = 0;

    std::vector<FieldSnapshot> reference;
    run(base, [&](const SimulationState& s, int) {
        reference.push_back(
            {s.t, s.flow.v.u, s.flow.v.v, s.charges.c_plus.values, s.charges.c_minus.values,
             s.psi.values});
    });

    SweepReport report;
    for (double k : kappas) {
        SimConfig ck = base;
        ck.kappa = k;
        SweepRow row;
        row.kappa = k;
        size_t idx = 0;
        double prev_t = 0.0;
        run(ck, [&](const SimulationState& s, int step) {
            if (idx >= reference.size() || std::abs(reference[idx].t - s.t) > 1e-12)
                throw StructuralError("kappa sweep: runs diverged in time stepping");
            const FieldSnapshot& ref = reference[idx];
            if (step > 0) {
                const double dt = s.t - prev_t;
                row.dist_v += dt * face_l2_sq(s.flow.v.u - ref.u, s.flow.v.v - ref.v, g);
                row.dist_c_plus +=
                    dt * (s.charges.c_plus.values - ref.cp).square().sum() * g.hx * g.hy;
                row.dist_c_minus +=
                    dt * (s.charges.c_minus.values - ref.cm).square().sum() * g.hx * g.hy;
                row.dist_psi += dt * (s.psi.values - ref.psi).square().sum() * g.hx * g.hy;
            }
            prev_t = s.t;
            ++idx;
        });
        row.dist_v = std::sqrt(row.dist_v);
        row.dist_c_plus = std::sqrt(row.dist_c_plus);
        row.dist_c_minus = std::sqrt(row.dist_c_minus);
        row.dist_psi = std::sqrt(row.dist_psi);
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace anisokin
