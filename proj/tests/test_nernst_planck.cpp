#include <doctest.h>

#include <cmath>
#include <random>

#include "anisokin/nernst_planck.hpp"

using namespace anisokin;

namespace {

ScalarField boltzmann(const Grid& g, const ScalarField& psi, int sign, double beta, double Z) {
    ScalarField c(g);
    c.values = Z * (-sign * beta * psi.values).exp();
    return c;
}

}  // namespace

TEST_CASE("Bernoulli kernel") {
    CHECK(bernoulli(0.0) == doctest::Approx(1.0));
    CHECK(bernoulli(1e-12) == doctest::Approx(1.0).epsilon(1e-10));
    // B(-z) = B(z) e^z
    for (double z : {0.3, 1.7, 5.0}) {
        CHECK(bernoulli(-z) == doctest::Approx(bernoulli(z) * std::exp(z)).epsilon(1e-13));
    }
    // stable far into both tails
    CHECK(bernoulli(800.0) == doctest::Approx(0.0));
    CHECK(bernoulli(-800.0) == doctest::Approx(800.0));
}

TEST_CASE("face flux vanishes in equilibrium") {
    const Grid g(8, 8, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("vortex", g), 0.5);
    const ScalarField c = ScalarField::constant(g, 2.5);
    const ScalarField psi = ScalarField::constant(g, 0.7);
    const VectorFieldMAC vel(g);
    const VectorFieldMAC F = np_face_flux(c, +1, vel, psi, lt, 1.0, 1.0);
    CHECK(F.max_abs() == 0.0);
}

TEST_CASE("classical Scharfetter-Gummel two-cell current") {
    // d = 0, v = 0, beta = 1, delta = psi_R - psi_L = ln 2, c_L = 2, c_R = 1.
    // For the minus species the flux is (D/h)(B(-delta) c_L - B(delta) c_R)
    //   = (1/h)(2 ln2/(1 - 1/2) - ln2/(2 - 1)) = (1/h) 3 ln 2,
    // which is also the hand value of the drift-diffusion current.
    const Grid g(4, 4, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("zero", g), 0.5);
    ScalarField c(g), psi(g);
    const double ln2 = std::log(2.0);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            psi.values(i, j) = i * ln2;
            c.values(i, j) = (i == 0) ? 2.0 : 1.0;
        }
    const VectorFieldMAC F = np_face_flux(c, -1, VectorFieldMAC(g), psi, lt, 1.0, 1.0);
    CHECK(F.u(1, 2) == doctest::Approx(3.0 * ln2 / g.hx).epsilon(1e-14));

    // The plus species sees c_R/c_L = exp(-delta): that is its Boltzmann
    // equilibrium, so the same data carries zero flux.
    const VectorFieldMAC Fp = np_face_flux(c, +1, VectorFieldMAC(g), psi, lt, 1.0, 1.0);
    CHECK(std::abs(Fp.u(1, 2)) <= 1e-14);
}

TEST_CASE("Boltzmann profiles are discrete steady states of the SG flux (d = 0)") {
    const Grid g(16, 16, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("zero", g), 0.5);
    const ScalarField psi = ScalarField::sample(
        g, [](double x, double y) { return 0.4 * std::cos(3.14159265358979324 * x) * y; });
    const VectorFieldMAC vel(g);
    for (int sign : {+1, -1}) {
        const ScalarField c = boltzmann(g, psi, sign, 1.0, 1.7);
        const VectorFieldMAC F = np_face_flux(c, sign, vel, psi, lt, 1.0, 1.0);
        CHECK(F.max_abs() <= 1e-12);
    }
}

TEST_CASE("species symmetry: sign flip equals potential negation, bitwise") {
    const Grid g(12, 12, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("quadrant", g), 0.5);
    const ScalarField psi =
        ScalarField::sample(g, [](double x, double y) { return std::sin(3.0 * x + y); });
    ScalarField npsi(g);
    npsi.values = -psi.values;
    const ScalarField c =
        ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.5 * x * y; });
    const VectorFieldMAC vel(g);
    const VectorFieldMAC a = np_face_flux(c, +1, vel, psi, lt, 1.0, 1.0);
    const VectorFieldMAC b = np_face_flux(c, -1, vel, npsi, lt, 1.0, 1.0);
    CHECK((a.u - b.u).abs().maxCoeff() == 0.0);
    CHECK((a.v - b.v).abs().maxCoeff() == 0.0);
}

TEST_CASE("np_step") {
    const Grid g(16, 16, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("zero", g), 0.5);
    const VectorFieldMAC vel(g);
    const ScalarField psi0(g);

    SUBCASE("uniform state is steady") {
        ChargePair pair(g);
        pair.c_plus.values.setConstant(1.0);
        pair.c_minus.values.setConstant(2.0);
        const ChargePair out = np_step(pair, vel, psi0, lt, 1e-3, 1.0, 1.0);
        CHECK((out.c_plus.values - 1.0).abs().maxCoeff() <= 1e-14);
        CHECK((out.c_minus.values - 2.0).abs().maxCoeff() <= 1e-14);
    }
    SUBCASE("zero concentration stays exactly zero") {
        ChargePair pair(g);
        const ChargePair out = np_step(pair, vel, psi0, lt, 1e-3, 1.0, 1.0);
        CHECK(out.c_plus.max_abs() == 0.0);
        CHECK(out.c_minus.max_abs() == 0.0);
    }
    SUBCASE("dt validation and CFL rejection") {
        ChargePair pair(g);
        pair.c_plus.values.setConstant(1.0);
        CHECK_THROWS_AS(np_step(pair, vel, psi0, lt, 0.0, 1.0, 1.0), ParameterError);
        VectorFieldMAC fast(g);
        fast.u.setConstant(10.0);
        fast.zero_boundary_normals();
        try {
            np_step(pair, fast, psi0, lt, 1e-1, 1.0, 1.0);
            FAIL("expected StepError");
        } catch (const StepError& e) {
            CHECK(e.max_admissible_dt > 0.0);
            CHECK(e.max_admissible_dt < 1e-1);
        }
    }
    SUBCASE("no-slip violation is structural") {
        ChargePair pair(g);
        VectorFieldMAC leaky(g);
        leaky.u.setConstant(1.0);  // boundary normals nonzero
        CHECK_THROWS_AS(np_step(pair, leaky, psi0, lt, 1e-4, 1.0, 1.0), StructuralError);
    }
}

TEST_CASE("mass conservation over many steps with drift and anisotropy") {
    const Grid g(32, 32, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("vortex", g), 0.5);
    const ScalarField psi = ScalarField::sample(
        g, [](double x, double y) { return 0.5 * std::sin(6.28 * x) * std::cos(6.28 * y); });
    ChargePair pair(g);
    pair.c_plus = ScalarField::sample(
        g, [](double x, double y) { return 1.0 + 0.5 * std::sin(6.28 * x * y); });
    pair.c_minus = ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.3 * x + y; });
    const VectorFieldMAC vel(g);
    NpWorkspace ws;
    const auto m0 = total_mass(pair);
    for (int s = 0; s < 200; ++s) pair = np_step(pair, vel, psi, lt, 1e-3, 1.0, 1.0, 0.9, &ws);
    const auto m1 = total_mass(pair);
    CHECK(std::abs(m1.first - m0.first) / m0.first <= 1e-13);
    CHECK(std::abs(m1.second - m0.second) / m0.second <= 1e-13);
}

TEST_CASE("anisotropic eigenmode decay at the isotropic rate") {
    // d = (0,1) masked to the interior leaves x-gradients isotropic, so the
    // Neumann mode cos(pi x) decays like exp(-pi^2 t / Pe).
    const Grid g(64, 64, 1.0, 1.0);
    DirectorField df(g);
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) df.dy(i, j) = 1.0;
    const TensorField lt = tensor_from_director(df, 0.5);
    const ScalarField mode = ScalarField::sample(
        g, [](double x, double) { return std::cos(3.14159265358979324 * x); });
    ChargePair pair(g);
    pair.c_plus.values = 1.0 + 0.5 * mode.values;
    pair.c_minus = pair.c_plus;
    const VectorFieldMAC vel(g);
    const ScalarField psi(g);
    NpWorkspace ws;
    auto amplitude = [&]() {
        return (pair.c_plus.values * mode.values).sum() / mode.values.square().sum();
    };
    const double a0 = amplitude();
    const int steps = 60;
    const double dt = 1e-3, Pe = 1.0;
    for (int s = 0; s < steps; ++s) pair = np_step(pair, vel, psi, lt, dt, Pe, 1.0, 0.9, &ws);
    const double rate = -std::log(amplitude() / a0) / (steps * dt);
    const double exact = 3.14159265358979324 * 3.14159265358979324 / Pe;
    CHECK(std::abs(rate - exact) / exact <= 0.02);
}

TEST_CASE("M-matrix structure of the implicit operator for d = 0") {
    const Grid g(8, 8, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("zero", g), 0.5);
    const ScalarField psi = ScalarField::sample(
        g, [](double x, double y) { return 0.8 * std::sin(2.0 * x) + 0.3 * y; });
    const SparseMat A = np_system_matrix(g, +1, psi, lt, 1e-3, 1.0, 1.0);
    const Eigen::MatrixXd D = Eigen::MatrixXd(A);
    const double vol = g.hx * g.hy;
    for (int r = 0; r < D.rows(); ++r) {
        CHECK(D(r, r) > 0.0);
        for (int c = 0; c < D.cols(); ++c)
            if (c != r) CHECK(D(r, c) <= 1e-15);
    }
    // column sums equal the cell volume: the diffusive part telescopes
    for (int c = 0; c < D.cols(); ++c)
        CHECK(D.col(c).sum() == doctest::Approx(vol).epsilon(1e-12));
}

TEST_CASE("positivity after implicit SG steps (d = 0, M-matrix)") {
    const Grid g(16, 16, 1.0, 1.0);
    const TensorField lt = tensor_from_director(preset_director("zero", g), 0.5);
    const ScalarField psi = ScalarField::sample(
        g, [](double x, double y) { return std::sin(5.0 * x) * std::cos(3.0 * y); });
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> dist(-0.5, 1.0);
    ChargePair pair(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            pair.c_plus.values(i, j) = std::max(0.0, dist(rng));   // touches zero
            pair.c_minus.values(i, j) = std::max(0.0, dist(rng));
        }
    NpWorkspace ws;
    for (int s = 0; s < 20; ++s)
        pair = np_step(pair, VectorFieldMAC(g), psi, lt, 2e-3, 1.0, 1.0, 0.9, &ws);
    const auto mins = min_value_audit(pair);
    CHECK(mins.first >= -1e-15);
    CHECK(mins.second >= -1e-15);
}

TEST_CASE("total mass and minima accessors") {
    const Grid g(8, 8, 2.0, 0.5);
    ChargePair pair(g);
    pair.c_plus.values.setConstant(1.0);
    pair.c_minus.values.setConstant(0.5);
    const auto m = total_mass(pair);
    CHECK(m.first == doctest::Approx(1.0));   // on a domain of measure 1
    CHECK(m.second == doctest::Approx(0.5));
    CHECK(m.first / m.second == doctest::Approx(2.0));
    const auto mins = min_value_audit(pair);
    CHECK(mins.first == 1.0);
    CHECK(mins.second == 0.5);
}
