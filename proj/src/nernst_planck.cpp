#include "anisokin/nernst_planck.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace anisokin {

double bernoulli(double z) {
    if (std::abs(z) < 1e-5) return 1.0 - 0.5 * z + z * z / 12.0;
    return z / std::expm1(z);
}

namespace {

// Linear stencil of one face's diffusive flux: F = sum w_k c(cells_k).
// At most 2 SG entries + 2 drift entries + 4 cross-difference entries.
struct FaceStencil {
    int cells[8];
    double w[8];
    int n = 0;
    void add(int cell, double weight) {
        cells[n] = cell;
        w[n] = weight;
        ++n;
    }
};

// Mirror ghost: clamp the tangential index into the grid.
inline int clampi(int k, int lo, int hi) { return k < lo ? lo : (k > hi ? hi : k); }

// Diffusive flux stencil on interior x-face (i,j), i in [1, nx-1]:
//   SG normal part with D = avg a11 and delta = sign beta (psi_R - psi_L),
//   cross part -a12 (dc/dy + sign beta c dpsi/dy) with corner-averaged
//   tangential differences and c averaged onto the face.
FaceStencil x_face_stencil(const Grid& g, int i, int j, int sign, const ScalarField& psi,
                           const TensorField& lt, double beta) {
    FaceStencil st;
    const int L = g.cell_index(i - 1, j), R = g.cell_index(i, j);
    const double D = 0.5 * (lt.a11(i - 1, j) + lt.a11(i, j));
    const double delta = sign * beta * (psi.values(i, j) - psi.values(i - 1, j));
    st.add(L, (D / g.hx) * bernoulli(delta));
    st.add(R, -(D / g.hx) * bernoulli(-delta));

    const double a12 = 0.5 * (lt.a12(i - 1, j) + lt.a12(i, j));
    if (a12 != 0.0) {
        const int jm = clampi(j - 1, 0, g.ny - 1), jp = clampi(j + 1, 0, g.ny - 1);
        const double k = -a12 / (4.0 * g.hy);
        st.add(g.cell_index(i - 1, jp), k);
        st.add(g.cell_index(i, jp), k);
        st.add(g.cell_index(i - 1, jm), -k);
        st.add(g.cell_index(i, jm), -k);
        const double dpsi_dy = (psi.values(i - 1, jp) + psi.values(i, jp) -
                                psi.values(i - 1, jm) - psi.values(i, jm)) /
                               (4.0 * g.hy);
        const double drift = -a12 * sign * beta * dpsi_dy * 0.5;
        st.add(L, drift);
        st.add(R, drift);
    }
    return st;
}

FaceStencil y_face_stencil(const Grid& g, int i, int j, int sign, const ScalarField& psi,
                           const TensorField& lt, double beta) {
    FaceStencil st;
    const int D_ = g.cell_index(i, j - 1), U = g.cell_index(i, j);
    const double D = 0.5 * (lt.a22(i, j - 1) + lt.a22(i, j));
    const double delta = sign * beta * (psi.values(i, j) - psi.values(i, j - 1));
    st.add(D_, (D / g.hy) * bernoulli(delta));
    st.add(U, -(D / g.hy) * bernoulli(-delta));

    const double a12 = 0.5 * (lt.a12(i, j - 1) + lt.a12(i, j));
    if (a12 != 0.0) {
        const int im = clampi(i - 1, 0, g.nx - 1), ip = clampi(i + 1, 0, g.nx - 1);
        const double k = -a12 / (4.0 * g.hx);
        st.add(g.cell_index(ip, j - 1), k);
        st.add(g.cell_index(ip, j), k);
        st.add(g.cell_index(im, j - 1), -k);
        st.add(g.cell_index(im, j), -k);
        const double dpsi_dx = (psi.values(ip, j - 1) + psi.values(ip, j) -
                                psi.values(im, j - 1) - psi.values(im, j)) /
                               (4.0 * g.hx);
        const double drift = -a12 * sign * beta * dpsi_dx * 0.5;
        st.add(D_, drift);
        st.add(U, drift);
    }
    return st;
}

double eval(const FaceStencil& st, const Eigen::ArrayXXd& c) {
    const double* data = c.data();
    double f = 0.0;
    for (int k = 0; k < st.n; ++k) f += st.w[k] * data[st.cells[k]];
    return f;
}

void check_shapes(const ScalarField& c, const VectorFieldMAC& vel, const ScalarField& psi,
                  const TensorField& lt) {
    if (!c.grid.same(vel.grid) || !c.grid.same(psi.grid) || !c.grid.same(lt.grid))
        throw StructuralError("nernst-planck: grid mismatch between fields");
}

// Divergence of the explicit advective flux Pe c_up v, volume-integrated.
Eigen::ArrayXXd advective_div_vol(const ScalarField& c, const VectorFieldMAC& vel, double Pe) {
    const Grid& g = c.grid;
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(g.nx, g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double u = vel.u(i, j);
            const double cup = u >= 0.0 ? c.values(i - 1, j) : c.values(i, j);
            const double F = Pe * cup * u * g.hy;
            out(i - 1, j) += F;
            out(i, j) -= F;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = vel.v(i, j);
            const double cup = v >= 0.0 ? c.values(i, j - 1) : c.values(i, j);
            const double F = Pe * cup * v * g.hx;
            out(i, j - 1) += F;
            out(i, j) -= F;
        }
    return out;
}

}  // namespace

VectorFieldMAC np_face_flux(const ScalarField& c, int sign, const VectorFieldMAC& vel,
                            const ScalarField& psi, const TensorField& lambda_tensor, double Pe,
                            double beta) {
    check_shapes(c, vel, psi, lambda_tensor);
    const Grid& g = c.grid;
    VectorFieldMAC F(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double u = vel.u(i, j);
            const double cup = u >= 0.0 ? c.values(i - 1, j) : c.values(i, j);
            F.u(i, j) = Pe * cup * u + eval(x_face_stencil(g, i, j, sign, psi, lambda_tensor, beta),
                                            c.values);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = vel.v(i, j);
            const double cup = v >= 0.0 ? c.values(i, j - 1) : c.values(i, j);
            F.v(i, j) = Pe * cup * v + eval(y_face_stencil(g, i, j, sign, psi, lambda_tensor, beta),
                                            c.values);
        }
    return F;
}

namespace {

// System triplets vol I + (dt/Pe) div(F_diff): a face flux F enters
// div(cell left of face) with +F facelen and div(cell right) with -F facelen.
void np_system_triplets(const Grid& g, int sign, const ScalarField& psi, const TensorField& lt,
                        double dt, double Pe, double beta,
                        std::vector<Eigen::Triplet<double>>& trip) {
    const double vol = g.hx * g.hy;
    const double scale = dt / Pe;
    trip.clear();
    trip.reserve(static_cast<size_t>(g.cells()) * 18);
    for (int c = 0; c < g.cells(); ++c) trip.emplace_back(c, c, vol);
    auto scatter = [&](const FaceStencil& st, int row_minus, int row_plus, double facelen) {
        for (int k = 0; k < st.n; ++k) {
            trip.emplace_back(row_plus, st.cells[k], scale * facelen * st.w[k]);
            trip.emplace_back(row_minus, st.cells[k], -scale * facelen * st.w[k]);
        }
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            scatter(x_face_stencil(g, i, j, sign, psi, lt, beta), g.cell_index(i, j),
                    g.cell_index(i - 1, j), g.hy);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            scatter(y_face_stencil(g, i, j, sign, psi, lt, beta), g.cell_index(i, j),
                    g.cell_index(i, j - 1), g.hx);
}

}  // namespace

SparseMat np_system_matrix(const Grid& g, int sign, const ScalarField& psi,
                           const TensorField& lambda_tensor, double dt, double Pe, double beta) {
    std::vector<Eigen::Triplet<double>> trip;
    np_system_triplets(g, sign, psi, lambda_tensor, dt, Pe, beta, trip);
    SparseMat A(g.cells(), g.cells());
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

double np_max_dt(const VectorFieldMAC& vel, double cfl) {
    const Grid& g = vel.grid;
    const double rate = vel.u.abs().maxCoeff() / g.hx + vel.v.abs().maxCoeff() / g.hy;
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return cfl / rate;
}

namespace {

ScalarField species_step(const ScalarField& c, int sign, const VectorFieldMAC& vel,
                         const ScalarField& psi, const TensorField& lt, double dt, double Pe,
                         double beta, NpWorkspace::Species* slot) {
    const Grid& g = c.grid;
    const double vol = g.hx * g.hy;
    const Eigen::ArrayXXd adv = advective_div_vol(c, vel, Pe);

    std::vector<Eigen::Triplet<double>> trip;
    np_system_triplets(g, sign, psi, lt, dt, Pe, beta, trip);
    Eigen::SparseMatrix<double> Ac(g.cells(), g.cells());  // column-major for SparseLU
    Ac.setFromTriplets(trip.begin(), trip.end());
    Ac.makeCompressed();

    Eigen::VectorXd b(g.cells());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            b(g.cell_index(i, j)) = vol * c.values(i, j) - (dt / Pe) * adv(i, j);

    NpWorkspace::Species local;
    NpWorkspace::Species* sp = slot ? slot : &local;
    if (!sp->lu) {
        sp->lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        sp->lu->analyzePattern(Ac);
        sp->factorized = false;
    }
    auto factorize = [&]() {
        sp->lu->factorize(Ac);
        if (sp->lu->info() != Eigen::Success)
            throw ConvergenceError("np_step: sparse LU factorization failed", 0.0, 0);
        sp->factorized = true;
    };

    Eigen::VectorXd x;
    const double bnorm = b.norm();
    bool solved = false;
    if (sp->factorized && bnorm > 0.0) {
        // Refinement against the stale factorization; refresh when it stalls.
        x = sp->lu->solve(b);
        for (int sweep = 0; sweep < 6; ++sweep) {
            const Eigen::VectorXd r = b - Ac * x;
            if (r.norm() <= 3e-14 * bnorm) {
                solved = true;
                break;
            }
            x += sp->lu->solve(r);
        }
    }
    if (!solved) {
        factorize();
        x = sp->lu->solve(b);
        if (sp->lu->info() != Eigen::Success)
            throw ConvergenceError("np_step: sparse LU solve failed", 0.0, 0);
    }

    ScalarField c_impl(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) c_impl.values(i, j) = x(g.cell_index(i, j));

    // Flux-form finish: evaluate the diffusive flux at the implicit solution
    // and update conservatively, so mass telescopes exactly.
    Eigen::ArrayXXd div_vol = adv;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double F = eval(x_face_stencil(g, i, j, sign, psi, lt, beta), c_impl.values) *
                             g.hy;
            div_vol(i - 1, j) += F;
            div_vol(i, j) -= F;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double F = eval(y_face_stencil(g, i, j, sign, psi, lt, beta), c_impl.values) *
                             g.hx;
            div_vol(i, j - 1) += F;
            div_vol(i, j) -= F;
        }
    ScalarField out(g);
    out.values = c.values - (dt / (Pe * vol)) * div_vol;
    if (!out.finite()) throw InvariantError("np_step: non-finite concentration");
    return out;
}

}  // namespace

ChargePair np_step(const ChargePair& pair, const VectorFieldMAC& vel, const ScalarField& psi,
                   const TensorField& lambda_tensor, double dt, double Pe, double beta, double cfl,
                   NpWorkspace* ws) {
    if (!(dt > 0.0)) throw ParameterError("np_step: dt must be positive");
    check_shapes(pair.c_plus, vel, psi, lambda_tensor);
    if (vel.boundary_normal_max() != 0.0)
        throw StructuralError("np_step: velocity has nonzero boundary-normal components");
    const double dt_max = np_max_dt(vel, cfl);
    if (dt > dt_max)
        throw StepError("np_step: advective CFL bound violated", dt_max);

    ChargePair out;
    out.c_plus = species_step(pair.c_plus, +1, vel, psi, lambda_tensor, dt, Pe, beta,
                              ws ? &ws->plus : nullptr);
    out.c_minus = species_step(pair.c_minus, -1, vel, psi, lambda_tensor, dt, Pe, beta,
                               ws ? &ws->minus : nullptr);
    return out;
}

std::pair<double, double> total_mass(const ChargePair& pair) {
    return {domain_integral(pair.c_plus), domain_integral(pair.c_minus)};
}

std::pair<double, double> min_value_audit(const ChargePair& pair) {
    return {pair.c_plus.min(), pair.c_minus.min()};
}

}  // namespace anisokin
