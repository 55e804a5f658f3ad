#include "anisokin/poisson.hpp"

#include <cmath>
#include <vector>

namespace anisokin {

namespace {

constexpr double kPi = 3.14159265358979323846;

double face_avg(const Eigen::ArrayXXd& a, int i0, int j0, int i1, int j1) {
    return 0.5 * (a(i0, j0) + a(i1, j1));
}

}  // namespace

RobinOperator::RobinOperator(const Grid& grid, const TensorField& tensor, double tau)
    : grid_(grid), tau_(tau), tensor_(tensor), robin_weight_(grid) {
    if (!(tau > 0.0)) throw ParameterError("robin operator: tau must be positive");
    if (!grid.same(tensor.grid)) throw StructuralError("robin operator: tensor grid mismatch");
    if (tensor.min_eigenvalue() < 1.0 - 1e-12)
        throw ParameterError("robin operator: tensor is not uniformly elliptic (min eig < 1)");

    const int nx = grid.nx, ny = grid.ny;
    const double hx = grid.hx, hy = grid.hy;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(nx) * ny * 12);
    auto idx = [&](int i, int j) { return grid_.cell_index(i, j); };
    auto add = [&](int r, int c, double v) { trip.emplace_back(r, c, v); };

    // Normal fluxes through interior faces: 5-point part.
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double k = (hy / hx) * face_avg(tensor.a11, i - 1, j, i, j);
            const int L = idx(i - 1, j), R = idx(i, j);
            add(L, L, k);
            add(R, R, k);
            add(L, R, -k);
            add(R, L, -k);
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double k = (hx / hy) * face_avg(tensor.a22, i, j - 1, i, j);
            const int D = idx(i, j - 1), U = idx(i, j);
            add(D, D, k);
            add(U, U, k);
            add(D, U, -k);
            add(U, D, -k);
        }

    // Cross term 2 a12 (dx psi)(dy psi) collocated at interior nodes with
    // corner-averaged one-sided differences; contributes k (p q^T + q p^T).
    for (int j = 1; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double a12n = 0.25 * (tensor.a12(i - 1, j - 1) + tensor.a12(i, j - 1) +
                                        tensor.a12(i - 1, j) + tensor.a12(i, j));
            if (a12n == 0.0) continue;
            const double k = hx * hy * a12n;
            const int c00 = idx(i - 1, j - 1), c10 = idx(i, j - 1);
            const int c01 = idx(i - 1, j), c11 = idx(i, j);
            // p^T psi = averaged d/dx, q^T psi = averaged d/dy at the node.
            const int cells[4] = {c00, c10, c01, c11};
            const double p[4] = {-0.5 / hx, 0.5 / hx, -0.5 / hx, 0.5 / hx};
            const double q[4] = {-0.5 / hy, -0.5 / hy, 0.5 / hy, 0.5 / hy};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    add(cells[a], cells[b], k * (p[a] * q[b] + q[a] * p[b]));
        }

    // Robin faces: outward flux w (xi - tau psi_C), diagonal gets facelen w tau.
    for (int j = 0; j < ny; ++j) {
        const double aL = tensor.a11(0, j), aR = tensor.a11(nx - 1, j);
        robin_weight_.left(j) = 2.0 * aL / (hx * tau + 2.0 * aL);
        robin_weight_.right(j) = 2.0 * aR / (hx * tau + 2.0 * aR);
        add(idx(0, j), idx(0, j), hy * robin_weight_.left(j) * tau);
        add(idx(nx - 1, j), idx(nx - 1, j), hy * robin_weight_.right(j) * tau);
    }
    for (int i = 0; i < nx; ++i) {
        const double aB = tensor.a22(i, 0), aT = tensor.a22(i, ny - 1);
        robin_weight_.bottom(i) = 2.0 * aB / (hy * tau + 2.0 * aB);
        robin_weight_.top(i) = 2.0 * aT / (hy * tau + 2.0 * aT);
        add(idx(i, 0), idx(i, 0), hx * robin_weight_.bottom(i) * tau);
        add(idx(i, ny - 1), idx(i, ny - 1), hx * robin_weight_.top(i) * tau);
    }

    matrix_.resize(grid.cells(), grid.cells());
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
}

Eigen::VectorXd RobinOperator::rhs(const ScalarField& f, double gamma,
                                   const BoundaryTrace& xi) const {
    if (!grid_.same(f.grid)) throw StructuralError("robin rhs: field grid mismatch");
    xi.require_sized(grid_);
    const int nx = grid_.nx, ny = grid_.ny;
    Eigen::VectorXd b(grid_.cells());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            b(grid_.cell_index(i, j)) = gamma * f.values(i, j) * grid_.hx * grid_.hy;
    for (int j = 0; j < ny; ++j) {
        b(grid_.cell_index(0, j)) += grid_.hy * robin_weight_.left(j) * xi.left(j);
        b(grid_.cell_index(nx - 1, j)) += grid_.hy * robin_weight_.right(j) * xi.right(j);
    }
    for (int i = 0; i < nx; ++i) {
        b(grid_.cell_index(i, 0)) += grid_.hx * robin_weight_.bottom(i) * xi.bottom(i);
        b(grid_.cell_index(i, ny - 1)) += grid_.hx * robin_weight_.top(i) * xi.top(i);
    }
    return b;
}

double RobinOperator::dirichlet_energy(const ScalarField& psi) const {
    if (!grid_.same(psi.grid)) throw StructuralError("dirichlet_energy: grid mismatch");
    const int nx = grid_.nx, ny = grid_.ny;
    const double hx = grid_.hx, hy = grid_.hy;
    const auto& s = psi.values;
    double acc = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double gx = (s(i, j) - s(i - 1, j)) / hx;
            acc += hx * hy * face_avg(tensor_.a11, i - 1, j, i, j) * gx * gx;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double gy = (s(i, j) - s(i, j - 1)) / hy;
            acc += hx * hy * face_avg(tensor_.a22, i, j - 1, i, j) * gy * gy;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double a12n = 0.25 * (tensor_.a12(i - 1, j - 1) + tensor_.a12(i, j - 1) +
                                        tensor_.a12(i - 1, j) + tensor_.a12(i, j));
            if (a12n == 0.0) continue;
            const double gx =
                (s(i, j - 1) + s(i, j) - s(i - 1, j - 1) - s(i - 1, j)) * 0.5 / hx;
            const double gy =
                (s(i - 1, j) + s(i, j) - s(i - 1, j - 1) - s(i, j - 1)) * 0.5 / hy;
            acc += 2.0 * hx * hy * a12n * gx * gy;
        }
    return acc;
}

double RobinOperator::boundary_strip_energy(const ScalarField& psi,
                                            const BoundaryTrace& xi) const {
    const BoundaryTrace tr = boundary_trace(psi, xi);
    const int nx = grid_.nx, ny = grid_.ny;
    const double hx = grid_.hx, hy = grid_.hy;
    const auto& s = psi.values;
    double acc = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double gl = (s(0, j) - tr.left(j)) / (0.5 * hx);
        const double gr = (tr.right(j) - s(nx - 1, j)) / (0.5 * hx);
        acc += hy * 0.5 * hx * (tensor_.a11(0, j) * gl * gl + tensor_.a11(nx - 1, j) * gr * gr);
    }
    for (int i = 0; i < nx; ++i) {
        const double gb = (s(i, 0) - tr.bottom(i)) / (0.5 * hy);
        const double gt = (tr.top(i) - s(i, ny - 1)) / (0.5 * hy);
        acc += hx * 0.5 * hy * (tensor_.a22(i, 0) * gb * gb + tensor_.a22(i, ny - 1) * gt * gt);
    }
    return acc;
}

BoundaryTrace RobinOperator::boundary_trace(const ScalarField& psi,
                                            const BoundaryTrace& xi) const {
    xi.require_sized(grid_);
    const int nx = grid_.nx, ny = grid_.ny;
    BoundaryTrace tr(grid_);
    const auto& s = psi.values;
    // psi_F = (xi + (2 a/h) psi_C) / (tau + 2 a/h).
    auto face_value = [&](double a, double h, double xiv, double sc) {
        const double two_a_h = 2.0 * a / h;
        return (xiv + two_a_h * sc) / (tau_ + two_a_h);
    };
    for (int j = 0; j < ny; ++j) {
        tr.left(j) = face_value(tensor_.a11(0, j), grid_.hx, xi.left(j), s(0, j));
        tr.right(j) = face_value(tensor_.a11(nx - 1, j), grid_.hx, xi.right(j), s(nx - 1, j));
    }
    for (int i = 0; i < nx; ++i) {
        tr.bottom(i) = face_value(tensor_.a22(i, 0), grid_.hy, xi.bottom(i), s(i, 0));
        tr.top(i) = face_value(tensor_.a22(i, ny - 1), grid_.hy, xi.top(i), s(i, ny - 1));
    }
    return tr;
}

ScalarField RobinOperator::wrap(const Eigen::VectorXd& x) const {
    ScalarField s(grid_);
    for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) s.values(i, j) = x(grid_.cell_index(i, j));
    return s;
}

Eigen::VectorXd RobinOperator::flatten(const ScalarField& s) const {
    Eigen::VectorXd x(grid_.cells());
    for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) x(grid_.cell_index(i, j)) = s.values(i, j);
    return x;
}

Eigen::VectorXd solve_spd(const SparseMat& A, const Eigen::VectorXd& b, double tol, int maxit,
                          bool jacobi, const Eigen::VectorXd* x0, CgResult* stats) {
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        if (stats) *stats = {0, 0.0};
        return Eigen::VectorXd::Zero(b.size());
    }
    Eigen::VectorXd inv_diag;
    if (jacobi) inv_diag = A.diagonal().cwiseInverse();

    Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b - A * x;
    Eigen::VectorXd z = jacobi ? (inv_diag.array() * r.array()).matrix().eval() : r;
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    double rnorm = r.norm();
    int it = 0;
    while (rnorm > tol * bnorm) {
        if (it >= maxit) {
            if (stats) *stats = {it, rnorm / bnorm};
            throw ConvergenceError("cg: maxit reached, relative residual " +
                                       std::to_string(rnorm / bnorm),
                                   rnorm / bnorm, it);
        }
        const Eigen::VectorXd Ap = A * p;
        const double alpha = rz / p.dot(Ap);
        x += alpha * p;
        r -= alpha * Ap;
        z = jacobi ? (inv_diag.array() * r.array()).matrix().eval() : r;
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        rnorm = r.norm();
        ++it;
    }
    if (stats) *stats = {it, rnorm / bnorm};
    return x;
}

ScalarField solve_potential(const RobinOperator& op, const ScalarField& charge_diff, double gamma,
                            const BoundaryTrace& xi, double tol, int maxit, bool jacobi,
                            const ScalarField* warm_start, CgResult* stats) {
    const Eigen::VectorXd b = op.rhs(charge_diff, gamma, xi);
    Eigen::VectorXd x0;
    if (warm_start) x0 = op.flatten(*warm_start);
    const Eigen::VectorXd x =
        solve_spd(op.matrix(), b, tol, maxit, jacobi, warm_start ? &x0 : nullptr, stats);
    return op.wrap(x);
}

ScalarField robin_resolvent_skappa(const RobinOperator& op, const ScalarField& f, double kappa,
                                   double tol, int maxit, CgResult* stats) {
    if (kappa < 0.0) throw ParameterError("S_kappa: kappa must be nonnegative");
    if (kappa == 0.0) {
        if (stats) *stats = {0, 0.0};
        return f;
    }
    const Grid& g = op.grid();
    if (!g.same(f.grid)) throw StructuralError("S_kappa: grid mismatch");
    const double vol = g.hx * g.hy;
    SparseMat M = op.matrix() * kappa;
    // vol * I + kappa * A, still SPD.
    for (int c = 0; c < g.cells(); ++c) M.coeffRef(c, c) += vol;
    const Eigen::VectorXd b = vol * op.flatten(f);
    const Eigen::VectorXd x = solve_spd(M, b, tol, maxit, false, nullptr, stats);
    return op.wrap(x);
}

ScalarField robin_resolvent_skappa(const RobinOperator& op, const ScalarField& c_plus,
                                   const ScalarField& c_minus, double kappa, double tol,
                                   int maxit, CgResult* stats) {
    if (!c_plus.grid.same(c_minus.grid)) throw StructuralError("S_kappa: species grid mismatch");
    ScalarField diff(c_plus.grid);
    diff.values = c_plus.values - c_minus.values;
    return robin_resolvent_skappa(op, diff, kappa, tol, maxit, stats);
}

namespace mms {

// Exact solution, bump-masked diagonal director and forcing for
//   -div((I + eps d(x)d^T) grad psi) = f,   E grad psi . n + tau psi = xi.
// With d = sin(pi x) sin(pi y) (1,1)/sqrt(2) the cross entry a12 is nonzero in
// the interior while d vanishes on the boundary, so xi = dn(psi) + tau psi.

double solution(double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y); }

namespace detail {
inline double psi_x(double x, double y) { return -kPi * std::sin(kPi * x) * std::cos(kPi * y); }
inline double psi_y(double x, double y) { return -kPi * std::cos(kPi * x) * std::sin(kPi * y); }
inline double psi_xx(double x, double y) {
    return -kPi * kPi * std::cos(kPi * x) * std::cos(kPi * y);
}
inline double psi_yy(double x, double y) {
    return -kPi * kPi * std::cos(kPi * x) * std::cos(kPi * y);
}
inline double psi_xy(double x, double y) {
    return kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
}
inline double bump(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }
inline double bump_x(double x, double y) { return kPi * std::cos(kPi * x) * std::sin(kPi * y); }
inline double bump_y(double x, double y) { return kPi * std::sin(kPi * x) * std::cos(kPi * y); }
}  // namespace detail

double forcing(double x, double y, double eps) {
    using namespace detail;
    const double phi = bump(x, y);
    const double sum_g = psi_x(x, y) + psi_y(x, y);
    // G = phi^2 (psi_x + psi_y); f = -lap(psi) - (eps/2)(G_x + G_y).
    const double Gx = 2.0 * phi * bump_x(x, y) * sum_g + phi * phi * (psi_xx(x, y) + psi_xy(x, y));
    const double Gy = 2.0 * phi * bump_y(x, y) * sum_g + phi * phi * (psi_xy(x, y) + psi_yy(x, y));
    return -(psi_xx(x, y) + psi_yy(x, y)) - 0.5 * eps * (Gx + Gy);
}

DirectorField director(const Grid& g, double lambda, double eps) {
    DirectorField df(g);
    df.lambda = lambda;
    df.epsilon = eps;
    const double s = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double phi = detail::bump(g.xc(i), g.yc(j));
            df.dx(i, j) = s * phi;
            df.dy(i, j) = s * phi;
        }
    return df;
}

BoundaryTrace xi(const Grid& g, double tau) {
    using namespace detail;
    BoundaryTrace tr(g);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.xc(i);
        tr.bottom(i) = -psi_y(x, 0.0) + tau * solution(x, 0.0);
        tr.top(i) = psi_y(x, g.ly) + tau * solution(x, g.ly);
    }
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.yc(j);
        tr.left(j) = -psi_x(0.0, y) + tau * solution(0.0, y);
        tr.right(j) = psi_x(g.lx, y) + tau * solution(g.lx, y);
    }
    return tr;
}

double l2_error(int n, double lambda, double eps, double tau, double tol) {
    const Grid g(n, n, 1.0, 1.0);
    const DirectorField df = director(g, lambda, eps);
    const TensorField E = tensor_from_director(df, eps);
    const RobinOperator op(g, E, tau);
    const ScalarField f =
        ScalarField::sample(g, [&](double x, double y) { return forcing(x, y, eps); });
    const ScalarField psi =
        solve_potential(op, f, 1.0, xi(g, tau), tol, 20 * g.cells(), false);
    const ScalarField exact = ScalarField::sample(g, solution);
    ScalarField diff(g);
    diff.values = (psi.values - exact.values).square();
    return std::sqrt(domain_integral(diff));
}

}  // namespace mms

}  // namespace anisokin
