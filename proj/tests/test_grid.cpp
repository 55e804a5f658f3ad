#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "anisokin/grid.hpp"

using namespace anisokin;

namespace {

VectorFieldMAC random_mac(const Grid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    VectorFieldMAC w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) w.u(i, j) = dist(rng);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = dist(rng);
    return w;
}

}  // namespace

TEST_CASE("grid construction and invariants") {
    const Grid g(8, 6, 2.0, 3.0);
    CHECK(g.hx == doctest::Approx(0.25));
    CHECK(g.hy == doctest::Approx(0.5));
    CHECK(g.xc(0) == doctest::Approx(0.125));
    CHECK(g.yc(5) == doctest::Approx(2.75));
    // centers are bit-exactly reproducible from indices
    CHECK(g.xc(3) == (3 + 0.5) * g.hx);
    CHECK_THROWS_AS(Grid(3, 8, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(Grid(8, 8, 0.0, 1.0), ParameterError);
}

TEST_CASE("divergence of MAC fields") {
    const Grid g(12, 9, 1.0, 1.0);

    SUBCASE("zero field") {
        const VectorFieldMAC w(g);
        CHECK(divergence_mac(w).max_abs() == 0.0);
    }
    SUBCASE("analytically divergence-free linear field") {
        const auto w = VectorFieldMAC::sample(
            g, [](double x, double) { return x; }, [](double, double y) { return -y; });
        CHECK(divergence_mac(w).max_abs() <= 1e-13);
    }
    SUBCASE("u = x gives unit divergence") {
        const auto w = VectorFieldMAC::sample(
            g, [](double x, double) { return x; }, [](double, double) { return 0.0; });
        const ScalarField d = divergence_mac(w);
        CHECK((d.values - 1.0).abs().maxCoeff() <= 1e-13);
    }
    SUBCASE("component shape mismatch") {
        VectorFieldMAC w(g);
        w.u.resize(3, 3);
        CHECK_THROWS_AS(divergence_mac(w), StructuralError);
    }
}

TEST_CASE("gradient to faces") {
    SUBCASE("constant field has zero gradient") {
        const Grid g(8, 8, 1.0, 1.0);
        const auto w = gradient_to_faces(ScalarField::constant(g, 7.5));
        CHECK(w.max_abs() == 0.0);
    }
    SUBCASE("linear profile") {
        const Grid g(8, 8, 1.0, 1.0);
        const auto w = gradient_to_faces(
            ScalarField::sample(g, [](double x, double) { return x; }));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) CHECK(w.u(i, j) == doctest::Approx(1.0));
        CHECK(w.boundary_normal_max() == 0.0);
    }
    SUBCASE("quadratic profile, hand-evaluated face value") {
        // hx = 0.25, s = x^2: face at x = 0.5 between centers 0.375 and 0.625
        // carries (0.390625 - 0.140625) / 0.25 = 1.0, the exact derivative at
        // the face midpoint.
        const Grid g(4, 4, 1.0, 1.0);
        const auto w = gradient_to_faces(
            ScalarField::sample(g, [](double x, double) { return x * x; }));
        CHECK(w.u(2, 1) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("ghost-fill hook closes the boundary faces") {
        const Grid g(4, 4, 1.0, 1.0);
        const ScalarField s = ScalarField::constant(g, 2.0);
        const auto w = gradient_to_faces(s, GhostFill([](Side, int) { return 0.0; }));
        CHECK(w.u(0, 1) == doctest::Approx(2.0 / g.hx));     // (2 - 0)/hx
        CHECK(w.u(g.nx, 1) == doctest::Approx(-2.0 / g.hx));  // (0 - 2)/hx
        CHECK(w.v(2, 0) == doctest::Approx(2.0 / g.hy));
        CHECK(w.u(2, 1) == 0.0);  // interior unchanged
        // the enum zero rule is the all-zeros hook
        const auto wz = gradient_to_faces(s, GhostRule::zero);
        CHECK((wz.u - w.u).abs().maxCoeff() == 0.0);
    }
}

TEST_CASE("center-to-face interpolation") {
    const Grid g(6, 6, 1.0, 1.0);
    SUBCASE("constant") {
        const auto w = interp_center_to_face(ScalarField::constant(g, 3.0));
        CHECK((w.u - 3.0).abs().maxCoeff() == 0.0);
        CHECK((w.v - 3.0).abs().maxCoeff() == 0.0);
    }
    SUBCASE("midpoint of adjacent cells") {
        ScalarField s(g);
        s.values(2, 3) = 1.0;
        s.values(3, 3) = 3.0;
        CHECK(interp_center_to_face(s).u(3, 3) == doctest::Approx(2.0));
    }
    SUBCASE("convex combination preserves bounds") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(0.0, 2.0);
        ScalarField s(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) s.values(i, j) = dist(rng);
        const auto w = interp_center_to_face(s);
        const double cmin = s.values.minCoeff();
        CHECK(w.u.minCoeff() >= cmin);
        CHECK(w.v.minCoeff() >= cmin);
    }
}

TEST_CASE("domain integral") {
    const Grid g(16, 16, 1.0, 1.0);
    CHECK(domain_integral(ScalarField::constant(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(domain_integral(ScalarField(g)) == 0.0);
    // midpoint rule is exact on linear integrands
    const double ix = domain_integral(ScalarField::sample(g, [](double x, double) { return x; }));
    CHECK(ix == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("boundary integral") {
    const Grid g(8, 8, 1.0, 1.0);
    SUBCASE("perimeter") {
        BoundaryTrace tr(g);
        tr.bottom.setConstant(1.0);
        tr.top.setConstant(1.0);
        tr.left.setConstant(1.0);
        tr.right.setConstant(1.0);
        CHECK(boundary_integral(g, tr) == doctest::Approx(4.0).epsilon(1e-15));
    }
    SUBCASE("zero trace") { CHECK(boundary_integral(g, BoundaryTrace(g)) == 0.0); }
    SUBCASE("linear trace on the bottom edge only") {
        BoundaryTrace tr(g);
        for (int i = 0; i < g.nx; ++i) tr.bottom(i) = g.xc(i);
        CHECK(boundary_integral(g, tr) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("wrong trace length") {
        BoundaryTrace tr(g);
        tr.left.resize(3);
        CHECK_THROWS_AS(boundary_integral(g, tr), StructuralError);
    }
}

TEST_CASE("summation by parts: volume divergence equals boundary flux") {
    const Grid g(10, 14, 2.0, 1.0);
    for (unsigned seed : {1u, 2u, 3u}) {
        const VectorFieldMAC w = random_mac(g, seed);
        const double lhs = domain_integral(divergence_mac(w));
        const double rhs = boundary_flux(w);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("div(grad) is symmetric negative semidefinite under Neumann closure") {
    const Grid g(6, 5, 1.0, 1.0);
    const int n = g.cells();
    Eigen::MatrixXd M(n, n);
    for (int k = 0; k < n; ++k) {
        ScalarField e(g);
        e.values(k % g.nx, k / g.nx) = 1.0;
        const ScalarField col = divergence_mac(gradient_to_faces(e));
        for (int l = 0; l < n; ++l) M(l, k) = col.values(l % g.nx, l / g.nx);
    }
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues();
    CHECK(ev.maxCoeff() <= 1e-12);        // negative semidefinite
    CHECK(ev.minCoeff() < -1.0);          // and not trivially zero
}

TEST_CASE("field operations preserve finiteness") {
    const Grid g(8, 8, 1.0, 1.0);
    const VectorFieldMAC w = random_mac(g, 11);
    CHECK(divergence_mac(w).finite());
    const ScalarField s = ScalarField::sample(g, [](double x, double y) { return x * y; });
    CHECK(gradient_to_faces(s).finite());
    CHECK(interp_center_to_face(s).finite());
}
