#include "anisokin/navier_stokes.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace anisokin {

VectorFieldMAC coulomb_force(const ScalarField& c_plus, const ScalarField& c_minus,
                             const ScalarField& psi, double alpha) {
    if (!c_plus.grid.same(c_minus.grid) || !c_plus.grid.same(psi.grid))
        throw StructuralError("coulomb_force: grid mismatch");
    const Grid& g = c_plus.grid;
    ScalarField rho(g);
    rho.values = c_plus.values - c_minus.values;
    const VectorFieldMAC rho_f = interp_center_to_face(rho);
    const VectorFieldMAC grad_psi = gradient_to_faces(psi);
    VectorFieldMAC f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.u(i, j) = -alpha * rho_f.u(i, j) * grad_psi.u(i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.v(i, j) = -alpha * rho_f.v(i, j) * grad_psi.v(i, j);
    return f;
}

namespace {

// Interior-face indexing for the component solves.
inline int uidx(const Grid& g, int i, int j) { return (i - 1) + (g.nx - 1) * j; }
inline int vidx(const Grid& g, int i, int j) { return i + g.nx * (j - 1); }

// -lap on interior x-faces: Dirichlet 0 at boundary x-faces, no-slip mirror
// ghosts (u_ghost = -u) across the y walls.
void laplacian_u_triplets(const Grid& g, int offset,
                          std::vector<Eigen::Triplet<double>>& trip) {
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const int r = offset + uidx(g, i, j);
            double diag = 2.0 * ax + 2.0 * ay;
            if (i > 1) trip.emplace_back(r, offset + uidx(g, i - 1, j), -ax);
            if (i < g.nx - 1) trip.emplace_back(r, offset + uidx(g, i + 1, j), -ax);
            if (j > 0) trip.emplace_back(r, offset + uidx(g, i, j - 1), -ay);
            else diag += ay;  // mirror ghost
            if (j < g.ny - 1) trip.emplace_back(r, offset + uidx(g, i, j + 1), -ay);
            else diag += ay;
            trip.emplace_back(r, r, diag);
        }
}

void laplacian_v_triplets(const Grid& g, int offset,
                          std::vector<Eigen::Triplet<double>>& trip) {
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int r = offset + vidx(g, i, j);
            double diag = 2.0 * ax + 2.0 * ay;
            if (j > 1) trip.emplace_back(r, offset + vidx(g, i, j - 1), -ay);
            if (j < g.ny - 1) trip.emplace_back(r, offset + vidx(g, i, j + 1), -ay);
            if (i > 0) trip.emplace_back(r, offset + vidx(g, i - 1, j), -ax);
            else diag += ax;
            if (i < g.nx - 1) trip.emplace_back(r, offset + vidx(g, i + 1, j), -ax);
            else diag += ax;
            trip.emplace_back(r, r, diag);
        }
}

Eigen::SparseMatrix<double> helmholtz_u_matrix(const Grid& g, double a) {
    const int n = (g.nx - 1) * g.ny;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * 6);
    laplacian_u_triplets(g, 0, trip);
    for (auto& t : trip) t = {t.row(), t.col(), a * t.value()};
    for (int r = 0; r < n; ++r) trip.emplace_back(r, r, 1.0);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Eigen::SparseMatrix<double> helmholtz_v_matrix(const Grid& g, double a) {
    const int n = g.nx * (g.ny - 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * 6);
    laplacian_v_triplets(g, 0, trip);
    for (auto& t : trip) t = {t.row(), t.col(), a * t.value()};
    for (int r = 0; r < n; ++r) trip.emplace_back(r, r, 1.0);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Eigen::SparseMatrix<double> pressure_matrix_pinned(const Grid& g) {
    // Volume-scaled Neumann Laplacian with cell 0 removed (pinned to zero);
    // the remaining principal submatrix is SPD.
    const int n = g.cells() - 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * 5);
    auto sub = [&](int c) { return c - 1; };  // cell index -> pinned index (cell 0 dropped)
    const double kx = g.hy / g.hx, ky = g.hx / g.hy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell_index(i, j);
            if (c == 0) continue;
            double diag = 0.0;
            auto couple = [&](int cn, double k) {
                diag += k;
                if (cn != 0) trip.emplace_back(sub(c), sub(cn), -k);
            };
            if (i > 0) couple(g.cell_index(i - 1, j), kx);
            if (i < g.nx - 1) couple(g.cell_index(i + 1, j), kx);
            if (j > 0) couple(g.cell_index(i, j - 1), ky);
            if (j < g.ny - 1) couple(g.cell_index(i, j + 1), ky);
            trip.emplace_back(sub(c), sub(c), diag);
        }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

}  // namespace

NsCache::NsCache(const Grid& g, double Re, double dt) : grid_(g), Re_(Re), dt_(dt) {
    if (!(Re > 0.0) || !(dt > 0.0)) throw ParameterError("ns cache: Re and dt must be positive");
    const double a = dt / Re;
    helm_u_.compute(helmholtz_u_matrix(g, a));
    helm_v_.compute(helmholtz_v_matrix(g, a));
    pressure_mat_ = pressure_matrix_pinned(g);
    pressure_.compute(pressure_mat_);
    if (helm_u_.info() != Eigen::Success || helm_v_.info() != Eigen::Success ||
        pressure_.info() != Eigen::Success)
        throw ConvergenceError("ns cache: factorization failed", 0.0, 0);
}

Eigen::VectorXd NsCache::solve_helmholtz_u(const Eigen::VectorXd& rhs) const {
    return helm_u_.solve(rhs);
}
Eigen::VectorXd NsCache::solve_helmholtz_v(const Eigen::VectorXd& rhs) const {
    return helm_v_.solve(rhs);
}
Eigen::VectorXd NsCache::solve_pressure(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = pressure_.solve(rhs);
    // one refinement sweep keeps the projection residual near round-off even
    // for O(1) divergence inputs
    x += pressure_.solve(rhs - pressure_mat_ * x);
    return x;
}

double ns_max_dt(const VectorFieldMAC& v, double cfl) {
    const Grid& g = v.grid;
    const double rate = v.u.abs().maxCoeff() / g.hx + v.v.abs().maxCoeff() / g.hy;
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return cfl / rate;
}

namespace {

// First-order upwind (v.grad)v on MAC faces, no-slip ghosts at the walls.
void advection(const VectorFieldMAC& w, Eigen::ArrayXXd& adv_u, Eigen::ArrayXXd& adv_v) {
    const Grid& g = w.grid;
    adv_u = Eigen::ArrayXXd::Zero(g.nx + 1, g.ny);
    adv_v = Eigen::ArrayXXd::Zero(g.nx, g.ny + 1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double uc = w.u(i, j);
            const double vc = 0.25 * (w.v(i - 1, j) + w.v(i - 1, j + 1) + w.v(i, j) +
                                      w.v(i, j + 1));
            const double dudx = uc >= 0.0 ? (w.u(i, j) - w.u(i - 1, j)) / g.hx
                                          : (w.u(i + 1, j) - w.u(i, j)) / g.hx;
            double dudy;
            if (vc >= 0.0)
                dudy = (j > 0) ? (w.u(i, j) - w.u(i, j - 1)) / g.hy
                               : (w.u(i, j) - (-w.u(i, j))) / g.hy;
            else
                dudy = (j < g.ny - 1) ? (w.u(i, j + 1) - w.u(i, j)) / g.hy
                                      : ((-w.u(i, j)) - w.u(i, j)) / g.hy;
            adv_u(i, j) = uc * dudx + vc * dudy;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double vc = w.v(i, j);
            const double uc = 0.25 * (w.u(i, j - 1) + w.u(i + 1, j - 1) + w.u(i, j) +
                                      w.u(i + 1, j));
            const double dvdy = vc >= 0.0 ? (w.v(i, j) - w.v(i, j - 1)) / g.hy
                                          : (w.v(i, j + 1) - w.v(i, j)) / g.hy;
            double dvdx;
            if (uc >= 0.0)
                dvdx = (i > 0) ? (w.v(i, j) - w.v(i - 1, j)) / g.hx
                               : (w.v(i, j) - (-w.v(i, j))) / g.hx;
            else
                dvdx = (i < g.nx - 1) ? (w.v(i + 1, j) - w.v(i, j)) / g.hx
                                      : ((-w.v(i, j)) - w.v(i, j)) / g.hx;
            adv_v(i, j) = uc * dvdx + vc * dvdy;
        }
}

}  // namespace

VectorFieldMAC ns_predict(const FlowState& state, const VectorFieldMAC& force, double dt,
                          const NsCache& cache, double cfl) {
    const Grid& g = state.v.grid;
    if (!g.same(cache.grid()) || !g.same(force.grid))
        throw StructuralError("ns_predict: grid mismatch");
    if (dt != cache.dt()) throw StructuralError("ns_predict: cache built for a different dt");
    const double dt_max = ns_max_dt(state.v, cfl);
    if (dt > dt_max) throw StepError("ns_predict: advective CFL bound violated", dt_max);

    Eigen::ArrayXXd adv_u, adv_v;
    advection(state.v, adv_u, adv_v);

    Eigen::VectorXd bu((g.nx - 1) * g.ny), bv(g.nx * (g.ny - 1));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            bu(uidx(g, i, j)) =
                state.v.u(i, j) + dt * (-adv_u(i, j) + force.u(i, j) / state.Re);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            bv(vidx(g, i, j)) =
                state.v.v(i, j) + dt * (-adv_v(i, j) + force.v(i, j) / state.Re);

    const Eigen::VectorXd xu = cache.solve_helmholtz_u(bu);
    const Eigen::VectorXd xv = cache.solve_helmholtz_v(bv);
    VectorFieldMAC v_star(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) v_star.u(i, j) = xu(uidx(g, i, j));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v_star.v(i, j) = xv(vidx(g, i, j));
    return v_star;
}

std::pair<VectorFieldMAC, ScalarField> pressure_project(const VectorFieldMAC& v_star, double dt,
                                                        double Re, const NsCache& cache) {
    const Grid& g = v_star.grid;
    if (!g.same(cache.grid())) throw StructuralError("pressure_project: grid mismatch");
    if (v_star.boundary_normal_max() != 0.0)
        throw StructuralError("pressure_project: v* has nonzero boundary normals");

    // The pinned matrix is the volume-integrated -lap, so lap(p) = (Re/dt) div v*
    // becomes A p = -(Re/dt) vol div v*.
    const ScalarField div = divergence_mac(v_star);
    const double vol = g.hx * g.hy;
    Eigen::VectorXd rhs(g.cells() - 1);
    for (int c = 1; c < g.cells(); ++c) {
        const int i = c % g.nx, j = c / g.nx;
        rhs(c - 1) = -(Re / dt) * div.values(i, j) * vol;
    }
    const Eigen::VectorXd x = cache.solve_pressure(rhs);

    ScalarField p(g);
    for (int c = 1; c < g.cells(); ++c) p.values(c % g.nx, c / g.nx) = x(c - 1);
    const double mean = p.values.mean();
    p.values -= mean;

    const VectorFieldMAC grad_p = gradient_to_faces(p);
    VectorFieldMAC v(g);
    v.u = v_star.u - (dt / Re) * grad_p.u;
    v.v = v_star.v - (dt / Re) * grad_p.v;
    v.zero_boundary_normals();
    return {std::move(v), std::move(p)};
}

FlowState ns_step(const FlowState& state, const ScalarField& c_plus, const ScalarField& c_minus,
                  const ScalarField& psi, double dt, const NsCache& cache, double cfl) {
    const VectorFieldMAC force = coulomb_force(c_plus, c_minus, psi, state.alpha);
    const VectorFieldMAC v_star = ns_predict(state, force, dt, cache, cfl);
    auto [v, p] = pressure_project(v_star, dt, state.Re, cache);
    if (!v.finite() || !p.finite()) throw InvariantError("ns_step: non-finite flow state");
    FlowState out;
    out.v = std::move(v);
    out.p = std::move(p);
    out.Re = state.Re;
    out.alpha = state.alpha;
    return out;
}

Eigen::SparseMatrix<double> vector_laplacian_matrix(const Grid& g) {
    const int nu = (g.nx - 1) * g.ny;
    const int n = nu + g.nx * (g.ny - 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * 5);
    laplacian_u_triplets(g, 0, trip);
    laplacian_v_triplets(g, nu, trip);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Eigen::SparseMatrix<double> mac_divergence_matrix(const Grid& g) {
    const int nu = (g.nx - 1) * g.ny;
    const int n = nu + g.nx * (g.ny - 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(g.cells()) * 4);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell_index(i, j);
            if (i + 1 <= g.nx - 1) trip.emplace_back(c, uidx(g, i + 1, j), 1.0 / g.hx);
            if (i >= 1) trip.emplace_back(c, uidx(g, i, j), -1.0 / g.hx);
            if (j + 1 <= g.ny - 1) trip.emplace_back(c, nu + vidx(g, i, j + 1), 1.0 / g.hy);
            if (j >= 1) trip.emplace_back(c, nu + vidx(g, i, j), -1.0 / g.hy);
        }
    Eigen::SparseMatrix<double> D(g.cells(), n);
    D.setFromTriplets(trip.begin(), trip.end());
    return D;
}

double kinetic_energy(const VectorFieldMAC& v, double Re) {
    const Grid& g = v.grid;
    const double vol = g.hx * g.hy;
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) acc += v.u(i, j) * v.u(i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) acc += v.v(i, j) * v.v(i, j);
    return 0.5 * Re * vol * acc;
}

double velocity_gradient_norm2(const VectorFieldMAC& v) {
    const Grid& g = v.grid;
    const double vol = g.hx * g.hy;
    double acc = 0.0;
    // du/dx at cell centers, du/dy at nodes with no-slip ghosts.
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double d = (v.u(i + 1, j) - v.u(i, j)) / g.hx;
            acc += d * d;
        }
    for (int i = 1; i < g.nx; ++i) {
        for (int j = 0; j <= g.ny; ++j) {
            const double above = j < g.ny ? v.u(i, j) : -v.u(i, j - 1);
            const double below = j > 0 ? v.u(i, j - 1) : -v.u(i, j);
            const double d = (above - below) / g.hy;
            const double w = (j == 0 || j == g.ny) ? 0.5 : 1.0;  // half cells at walls
            acc += w * d * d;
        }
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double d = (v.v(i, j + 1) - v.v(i, j)) / g.hy;
            acc += d * d;
        }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double right = i < g.nx ? v.v(i, j) : -v.v(i - 1, j);
            const double left = i > 0 ? v.v(i - 1, j) : -v.v(i, j);
            const double d = (right - left) / g.hx;
            const double w = (i == 0 || i == g.nx) ? 0.5 : 1.0;
            acc += w * d * d;
        }
    }
    return vol * acc;
}

}  // namespace anisokin
