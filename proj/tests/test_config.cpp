#include <doctest.h>

#include "anisokin/config.hpp"

using namespace anisokin;

TEST_CASE("empty text yields the full default configuration") {
    const SimConfig cfg = parse_config_text("");
    CHECK(cfg.nx == 64);
    CHECK(cfg.ny == 64);
    CHECK(cfg.Re == 1.0);
    CHECK(cfg.Pe == 1.0);
    CHECK(cfg.alpha == 1.0);
    CHECK(cfg.beta == 1.0);
    CHECK(cfg.gamma == 1.0);
    CHECK(cfg.tau == 1.0);
    CHECK(cfg.lambda == 0.5);
    CHECK(cfg.epsilon == 0.5);
    CHECK(cfg.kappa == 0.0);
    CHECK(cfg.director_preset == "zero");
    CHECK(cfg.picard_tol == 1e-8);
    CHECK(cfg.picard_maxit == 50);
    CHECK(cfg.effective_poisson_maxit() == 10 * 64 * 64);
}

TEST_CASE("parsing") {
    SUBCASE("values, comments and whitespace") {
        const SimConfig cfg = parse_config_text(
            "# a comment\n"
            "grid.nx = 32   # trailing comment\n"
            "  time.dt =  2e-3\n"
            "\n"
            "director.preset = vortex\n");
        CHECK(cfg.nx == 32);
        CHECK(cfg.dt == 2e-3);
        CHECK(cfg.director_preset == "vortex");
    }
    SUBCASE("unknown keys are rejected with the line number") {
        try {
            parse_config_text("grid.nx = 32\nnp.qe = 1\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 2);
        }
    }
    SUBCASE("malformed lines carry line numbers") {
        try {
            parse_config_text("\n\ngrid.nx\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line == 3);
        }
    }
    SUBCASE("non-numeric values rejected") {
        CHECK_THROWS_AS(parse_config_text("time.dt = fast\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("grid.nx = 4.5\n"), ConfigError);
    }
}

TEST_CASE("constraint validation") {
    CHECK_THROWS_AS(parse_config_text("np.Pe = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("np.Pe = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("grid.nx = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("reg.kappa = -0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("bc.tau = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("director.lambda = -0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("director.preset = unknown\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("bc.xi.waveform = sawtooth\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("bc.xi.profile = radial\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("ic.charges = delta\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("ns.cfl = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("poisson.precond = ilu\n"), ConfigError);
    CHECK_NOTHROW(parse_config_text("poisson.precond = diag\n"));
}

TEST_CASE("serialize / parse round trip is idempotent") {
    const SimConfig cfg = parse_config_text(
        "grid.nx = 48\ntime.dt = 2.5e-3\nbc.xi.waveform = sinusoid\n"
        "bc.xi.amplitude = 0.75\ndirector.preset = quadrant\nreg.kappa = 1e-3\n"
        "poisson.precond = diag\nout.vtk_prefix = snap\n");
    const std::string once = serialize(parse_config_text(serialize(cfg)));
    CHECK(once == serialize(cfg));
}

TEST_CASE("boundary datum traces") {
    const Grid g(8, 8, 1.0, 1.0);
    SUBCASE("uniform constant") {
        SimConfig cfg = parse_config_text("bc.xi.amplitude = 0.5\n");
        const BoundaryTrace tr = xi_trace(g, cfg, 17.3);
        CHECK(tr.bottom(3) == 0.5);
        CHECK(tr.left(5) == 0.5);
    }
    SUBCASE("left-right antisymmetric sinusoid") {
        SimConfig cfg = parse_config_text(
            "bc.xi.waveform = sinusoid\nbc.xi.amplitude = 2.0\nbc.xi.frequency = 0.25\n"
            "bc.xi.profile = left_right_antisymmetric\n");
        const BoundaryTrace tr = xi_trace(g, cfg, 0.5);  // sin(2 pi 0.25 0.5) = sin(pi/4)
        const double expect = 2.0 * std::sin(3.14159265358979324 / 4.0);
        CHECK(tr.left(2) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(tr.right(2) == doctest::Approx(-expect).epsilon(1e-14));
        CHECK(tr.bottom.abs().maxCoeff() == 0.0);
        CHECK(tr.top.abs().maxCoeff() == 0.0);
    }
}

TEST_CASE("smallness gate arithmetic") {
    const Grid g(16, 16, 1.0, 1.0);
    // Unit proxy: uniform d = (1, 0) has max norm 1 and zero interior
    // Laplacian, so the gate value is kappa c (1 + 1).
    DirectorField unit(g);
    unit.dx.setConstant(1.0);

    CHECK(gate_value(1.0 / 64.0, 1.0, unit) == doctest::Approx(1.0 / 32.0).epsilon(1e-15));
    CHECK(gate_admits(1.0 / 64.0, 1.0, unit));        // boundary case admitted
    CHECK_FALSE(gate_admits(1.0 / 32.0, 1.0, unit));  // refused
    CHECK(gate_admits(0.0, 1.0, unit));               // kappa = 0 always admitted

    // zero director: proxy 0, gate value = kappa
    const DirectorField none = preset_director("zero", g);
    CHECK(gate_value(1e-2, 1.0, none) == doctest::Approx(1e-2));
    CHECK(gate_admits(1e-2, 1.0, none));
    CHECK_FALSE(gate_admits(1e-2, 10.0, none));  // c_gate scales the bound

    // masked presets have grid-scale Laplacians and huge proxies
    const DirectorField vortex = preset_director("vortex", g);
    CHECK_FALSE(gate_admits(1e-2, 1.0, vortex));
}
