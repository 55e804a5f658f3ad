#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "anisokin/output.hpp"
#include "anisokin/simulation.hpp"

using namespace anisokin;

namespace {

SimConfig small_config(const std::string& extra = "") {
    SimConfig cfg = parse_config_text(
        "grid.nx = 16\ngrid.ny = 16\ntime.T = 0.02\ntime.dt = 1e-3\n" + extra);
    cfg.out_ledger.clear();
    cfg.out_summary.clear();
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("electroneutral null run stays identically at rest") {
    SimConfig cfg = small_config("ic.charges = gaussian_blob_pair\nic.background = 0.5\n");
    // electroneutral: same blob for both species
    cfg.ic_charges = "uniform";
    double max_psi = 0.0, max_v = 0.0;
    const RunResult r = run(cfg, [&](const SimulationState& s, int) {
        max_psi = std::max(max_psi, s.psi.max_abs());
        max_v = std::max(max_v, s.flow.v.max_abs());
    });
    CHECK(r.summary.steps == 20);
    CHECK(max_psi <= 1e-12);
    CHECK(max_v <= 1e-12);
    CHECK(r.summary.max_rho <= 1e-12);
    CHECK(r.summary.mass_drift <= 1e-12);
}

TEST_CASE("picard converges in one iteration on the electroneutral fixed point") {
    SimConfig cfg = small_config();
    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    SimCaches caches(g, tensor_from_director(preset_director("zero", g), cfg.epsilon), cfg);
    const SimulationState s0 = initial_state(cfg, caches);
    StepReport rep;
    const SimulationState s1 = coupled_step(s0, cfg, caches, cfg.dt, &rep);
    CHECK(rep.picard_iterations == 1);
    CHECK((s1.charges.c_plus.values - s0.charges.c_plus.values).abs().maxCoeff() <= 1e-14);
    CHECK(s1.psi.max_abs() == 0.0);
    CHECK(s1.flow.v.max_abs() == 0.0);
}

TEST_CASE("picard contraction factors stay below one on a driven run") {
    SimConfig cfg = small_config(
        "bc.xi.waveform = sinusoid\nbc.xi.amplitude = 1.0\n"
        "bc.xi.profile = left_right_antisymmetric\nic.charges = gaussian_blob_pair\n"
        "ic.background = 0.5\ndirector.preset = vortex\n");
    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    SimCaches caches(g,
                     tensor_from_director(preset_director(cfg.director_preset, g, cfg.lambda,
                                                          cfg.epsilon),
                                          cfg.epsilon),
                     cfg);
    SimulationState s = initial_state(cfg, caches);
    for (int n = 0; n < 5; ++n) {
        StepReport rep;
        s = coupled_step(s, cfg, caches, cfg.dt, &rep);
        CHECK(rep.last_contraction < 1.0);
        CHECK(rep.picard_iterations >= 2);
        CHECK(rep.dt_used == cfg.dt);
    }
}

TEST_CASE("phi stays consistent with the charges after every step") {
    SimConfig cfg = small_config(
        "reg.kappa = 1e-3\nbc.xi.amplitude = 0.5\nic.charges = separated_slabs\n"
        "ic.background = 0.3\n");
    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    SimCaches caches(g, tensor_from_director(preset_director("zero", g), cfg.epsilon), cfg);
    SimulationState s = initial_state(cfg, caches);
    for (int n = 0; n < 3; ++n) {
        s = coupled_step(s, cfg, caches, cfg.dt);
        ScalarField diff(g);
        diff.values = s.charges.c_plus.values - s.charges.c_minus.values;
        const ScalarField phi_check = caches.apply_skappa(diff);
        CHECK((phi_check.values - s.phi.values).abs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("single kappa=0 sweep entry reports zero distances") {
    SimConfig cfg = small_config("ic.charges = gaussian_blob_pair\nic.background = 0.5\n"
                                 "bc.xi.amplitude = 1.0\n");
    const SweepReport rep = kappa_sweep(cfg, {0.0});
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].total() == 0.0);
}

TEST_CASE("one step at kappa -> 0 approaches the unregularized step linearly") {
    SimConfig base = small_config(
        "bc.xi.amplitude = 1.0\nbc.xi.profile = left_right_antisymmetric\n"
        "ic.charges = gaussian_blob_pair\nic.background = 0.5\n");
    const Grid g(base.nx, base.ny, base.lx, base.ly);

    auto one_step = [&](double kappa) {
        SimConfig cfg = base;
        cfg.kappa = kappa;
        SimCaches caches(g, tensor_from_director(preset_director("zero", g), cfg.epsilon), cfg);
        SimulationState s = initial_state(cfg, caches);
        return coupled_step(s, cfg, caches, cfg.dt);
    };
    const SimulationState ref = one_step(0.0);
    double prev = -1.0;
    for (double kappa : {1e-2, 1e-3, 1e-4}) {
        const SimulationState sk = one_step(kappa);
        const double dist = (sk.psi.values - ref.psi.values).abs().maxCoeff() +
                            (sk.charges.c_plus.values - ref.charges.c_plus.values)
                                .abs()
                                .maxCoeff();
        if (prev > 0.0) {
            CHECK(dist < prev);
            CHECK(prev / dist > 5.0);   // roughly linear in kappa
            CHECK(prev / dist < 20.0);
        }
        prev = dist;
    }
}

TEST_CASE("sweep distances decrease monotonically in kappa") {
    SimConfig cfg = small_config(
        "bc.xi.waveform = sinusoid\nbc.xi.amplitude = 1.0\n"
        "bc.xi.profile = left_right_antisymmetric\nic.charges = gaussian_blob_pair\n"
        "ic.background = 0.5\n");
    const SweepReport rep = kappa_sweep(cfg, {1e-2, 1e-3, 1e-4});
    REQUIRE(rep.rows.size() == 3);
    for (size_t k = 1; k < rep.rows.size(); ++k) {
        CHECK(rep.rows[k].dist_psi < rep.rows[k - 1].dist_psi);
        CHECK(rep.rows[k].dist_c_plus < rep.rows[k - 1].dist_c_plus);
        CHECK(rep.rows[k].total() < rep.rows[k - 1].total());
    }
}

TEST_CASE("the gate refuses masked directors in regularized runs") {
    SimConfig cfg = small_config("director.preset = vortex\n");
    CHECK_THROWS_AS(kappa_sweep(cfg, {1e-2}), ConfigError);
    cfg.kappa = 1e-2;
    CHECK_THROWS_AS(run(cfg), ConfigError);
}

TEST_CASE("species swap with negated datum mirrors the potential") {
    SimConfig cfg = small_config(
        "bc.xi.waveform = sinusoid\nbc.xi.amplitude = 1.0\n"
        "bc.xi.profile = left_right_antisymmetric\nic.charges = separated_slabs\n"
        "ic.background = 0.4\ndirector.preset = quadrant\n");
    SimConfig swapped = cfg;
    swapped.xi_amplitude = -cfg.xi_amplitude;

    const Grid g(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
    const TensorField E =
        tensor_from_director(preset_director(cfg.director_preset, g, cfg.lambda, cfg.epsilon),
                             cfg.epsilon);
    SimCaches ca(g, E, cfg), cb(g, E, swapped);
    SimulationState a = initial_state(cfg, ca);
    SimulationState b = initial_state(swapped, cb);
    std::swap(b.charges.c_plus, b.charges.c_minus);
    // re-establish phi/psi for the swapped initial state
    ScalarField diff(g);
    diff.values = b.charges.c_plus.values - b.charges.c_minus.values;
    b.phi = cb.apply_skappa(diff);
    b.psi = cb.solve_psi(b.phi, swapped.gamma, xi_trace(g, swapped, 0.0));

    for (int n = 0; n < 5; ++n) {
        a = coupled_step(a, cfg, ca, cfg.dt);
        b = coupled_step(b, swapped, cb, swapped.dt);
    }
    CHECK((a.psi.values + b.psi.values).abs().maxCoeff() <= 1e-10);
    CHECK((a.charges.c_plus.values - b.charges.c_minus.values).abs().maxCoeff() <= 1e-10);
    CHECK((a.charges.c_minus.values - b.charges.c_plus.values).abs().maxCoeff() <= 1e-10);
    CHECK((a.flow.v.u - b.flow.v.u).abs().maxCoeff() <= 1e-10);
    CHECK((a.flow.v.v - b.flow.v.v).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("reruns reproduce the ledger bit for bit") {
    const char* path1 = "/tmp/anisokin_test_ledger1.csv";
    const char* path2 = "/tmp/anisokin_test_ledger2.csv";
    SimConfig cfg = small_config(
        "bc.xi.waveform = sinusoid\nbc.xi.amplitude = 1.0\n"
        "bc.xi.profile = left_right_antisymmetric\nic.charges = gaussian_blob_pair\n"
        "ic.background = 0.5\ndirector.preset = quadrant\n");
    cfg.out_ledger = path1;
    run(cfg);
    cfg.out_ledger = path2;
    run(cfg);
    const std::string a = slurp(path1), b = slurp(path2);
    CHECK(a.size() > 0);
    CHECK(a == b);
    std::remove(path1);
    std::remove(path2);
}

TEST_CASE("ledger round trip and the audit CLI entry point") {
    const char* path = "/tmp/anisokin_test_ledger3.csv";
    SimConfig cfg = small_config("bc.xi.amplitude = 0.5\nic.charges = gaussian_blob_pair\n"
                                 "ic.background = 0.5\n");
    cfg.out_ledger = path;
    const RunResult r = run(cfg);
    const EnergyLedger back = read_ledger_csv(path);
    REQUIRE(back.rows.size() == r.ledger.rows.size());
    for (size_t k = 0; k < back.rows.size(); ++k) {
        CHECK(back.rows[k].t == r.ledger.rows[k].t);
        CHECK(back.rows[k].residual == r.ledger.rows[k].residual);
        // the stored residual reproduces the audit recomputation
        CHECK(audit_energy_inequality(back, static_cast<int>(k)) ==
              doctest::Approx(back.rows[k].residual).epsilon(1e-12));
    }
    std::remove(path);
}

TEST_CASE("run writes snapshots and summaries") {
    SimConfig cfg = small_config("ic.charges = gaussian_blob_pair\nic.background = 0.5\n");
    cfg.out_vtk_prefix = "/tmp/anisokin_test_snap";
    cfg.snapshot_every = 10;
    cfg.out_summary = "/tmp/anisokin_test_summary.json";
    run(cfg);
    const std::string vtk = slurp("/tmp/anisokin_test_snap_000010.vtk");
    CHECK(vtk.find("DATASET STRUCTURED_POINTS") != std::string::npos);
    CHECK(vtk.find("SCALARS c_plus double 1") != std::string::npos);
    CHECK(vtk.find("VECTORS velocity double") != std::string::npos);
    const std::string summary = slurp("/tmp/anisokin_test_summary.json");
    CHECK(summary.find("\"steps\": 20") != std::string::npos);
    std::remove("/tmp/anisokin_test_snap_000000.vtk");
    std::remove("/tmp/anisokin_test_snap_000010.vtk");
    std::remove("/tmp/anisokin_test_snap_000020.vtk");
    std::remove("/tmp/anisokin_test_summary.json");
}

TEST_CASE("invariants hold on a short anisotropic driven run") {
    SimConfig cfg = small_config(
        "grid.nx = 32\ngrid.ny = 32\ntime.T = 0.05\n"
        "bc.xi.waveform = sinusoid\nbc.xi.amplitude = 1.0\n"
        "bc.xi.profile = left_right_antisymmetric\nic.charges = separated_slabs\n"
        "ic.background = 0.2\ndirector.preset = quadrant\n");
    double max_div = 0.0;
    const RunResult r = run(cfg, [&](const SimulationState& s, int) {
        max_div = std::max(max_div, divergence_mac(s.flow.v).max_abs());
    });
    CHECK(r.summary.mass_drift <= 1e-12);
    CHECK(r.summary.min_c >= -1e-14);
    CHECK(max_div <= 1e-10);
    for (const auto& row : r.ledger.rows) CHECK(std::isfinite(row.residual));
}
