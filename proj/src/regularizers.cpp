#include "anisokin/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "anisokin/navier_stokes.hpp"
#include "anisokin/poisson.hpp"

namespace anisokin {

namespace {

void cache_spectrum(DenseOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success) throw SpectralError("dense operator: eigensolver failed");
    op.eigenvalues = es.eigenvalues();
    op.eigenvectors = es.eigenvectors();
}

}  // namespace

DenseOperator build_dense_stokes(const Grid& g) {
    const int n = (g.nx - 1) * g.ny + g.nx * (g.ny - 1);
    if (n > 1024)
        throw ParameterError("dense stokes: more than 1024 velocity unknowns");
    const Eigen::MatrixXd L = Eigen::MatrixXd(vector_laplacian_matrix(g));
    const Eigen::MatrixXd D = Eigen::MatrixXd(mac_divergence_matrix(g));

    // Leray projector: orthonormal basis of ker(D) from the SVD.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    const double tol = 1e-12 * std::max(1.0, smax);
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) > tol) ++rank;
    const Eigen::MatrixXd K = svd.matrixV().rightCols(n - rank);

    DenseOperator op;
    op.n = n;
    op.kind = OperatorKind::stokes;
    op.projector = K * K.transpose();
    op.projector = 0.5 * (op.projector + op.projector.transpose()).eval();
    op.matrix = op.projector * L * op.projector;
    op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
    cache_spectrum(op);
    return op;
}

DenseOperator build_dense_robin(const Grid& g, const TensorField& tensor, double tau) {
    if (g.cells() > 1024) throw ParameterError("dense robin: more than 1024 unknowns");
    const RobinOperator sparse_op(g, tensor, tau);
    DenseOperator op;
    op.n = g.cells();
    op.kind = OperatorKind::robin_laplacian;
    op.matrix = sparse_op.dense() / (g.hx * g.hy);
    op.projector = Eigen::MatrixXd::Identity(op.n, op.n);
    cache_spectrum(op);
    return op;
}

DenseOperator operator_sqrt(const DenseOperator& A) {
    Eigen::VectorXd lam = A.eigenvalues;
    for (int k = 0; k < lam.size(); ++k) {
        if (lam(k) < -1e-10)
            throw SpectralError("operator_sqrt: negative eigenvalue " + std::to_string(lam(k)));
        lam(k) = std::sqrt(std::max(0.0, lam(k)));
    }
    DenseOperator R;
    R.n = A.n;
    R.kind = A.kind;
    R.projector = A.projector;
    R.matrix = A.eigenvectors * lam.asDiagonal() * A.eigenvectors.transpose();
    R.eigenvalues = lam;
    R.eigenvectors = A.eigenvectors;
    return R;
}

Eigen::VectorXd resolvent_apply(const DenseOperator& A, const Eigen::VectorXd& x, double kappa) {
    if (kappa < 0.0) throw ParameterError("resolvent: kappa must be nonnegative");
    if (x.size() != A.n) throw StructuralError("resolvent: vector size mismatch");
    if (kappa == 0.0) return x;
    const Eigen::MatrixXd M =
        Eigen::MatrixXd::Identity(A.n, A.n) + kappa * A.matrix;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success)
        throw StructuralError("resolvent: singular shifted system");
    return ldlt.solve(x);
}

void ResolventReport::write_csv(std::ostream& os) const {
    os << "kappa,max_residual,max_dual_pairing,max_norm_ratio\n";
    for (size_t k = 0; k < kappas.size(); ++k)
        os << kappas[k] << ',' << max_residual[k] << ',' << max_dual_pairing[k] << ','
           << max_norm_ratio[k] << '\n';
    os << "# graph_bound_constant," << graph_bound_constant << '\n';
    os << "# smooth_log_slope," << smooth_log_slope << '\n';
}

ResolventReport lemma31_suite(const DenseOperator& A, int trials,
                              const std::vector<double>& kappas) {
    if (trials < 10) throw ParameterError("lemma31_suite: need at least 10 trials");
    std::vector<double> ks = kappas;
    std::sort(ks.begin(), ks.end(), std::greater<>());

    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&]() {
        Eigen::VectorXd x(A.n);
        for (int k = 0; k < A.n; ++k) x(k) = gauss(rng);
        x = (A.projector * x).eval();
        x.normalize();
        return x;
    };

    std::vector<Eigen::VectorXd> xs(trials), phis(trials);
    for (int t = 0; t < trials; ++t) xs[t] = draw();
    for (int t = 0; t < trials; ++t) phis[t] = draw();

    ResolventReport rep;
    rep.kappas = ks;
    rep.max_residual.assign(ks.size(), 0.0);
    rep.max_dual_pairing.assign(ks.size(), 0.0);
    rep.max_norm_ratio.assign(ks.size(), 0.0);

    std::vector<std::vector<double>> residual(trials, std::vector<double>(ks.size(), 0.0));
    double graph_c = 0.0;
    for (size_t k = 0; k < ks.size(); ++k) {
        for (int t = 0; t < trials; ++t) {
            const Eigen::VectorXd y = resolvent_apply(A, xs[t], ks[k]);
            const double res = (y - xs[t]).norm();
            residual[t][k] = res;
            rep.max_residual[k] = std::max(rep.max_residual[k], res);
            rep.max_norm_ratio[k] = std::max(rep.max_norm_ratio[k], y.norm());
            rep.max_dual_pairing[k] =
                std::max(rep.max_dual_pairing[k], std::abs(phis[t].dot(y - xs[t])));
            graph_c = std::max(graph_c, (A.matrix * y).norm() / (1.0 + 1.0 / ks[k]));
        }
    }
    rep.graph_bound_constant = graph_c;

    // Item 1 (strong convergence): residuals decrease monotonically with kappa.
    for (int t = 0; t < trials; ++t)
        for (size_t k = 1; k < ks.size(); ++k)
            if (residual[t][k] >= residual[t][k - 1] && residual[t][k - 1] > 1e-14)
                throw InvariantError(
                    "regularization suite: item 1 (strong convergence) monotonicity violated");
    // Item 2 (weak convergence via dual pairings).
    for (size_t k = 1; k < ks.size(); ++k)
        if (rep.max_dual_pairing[k] >= rep.max_dual_pairing[k - 1] &&
            rep.max_dual_pairing[k - 1] > 1e-14)
            throw InvariantError(
                "regularization suite: item 2 (weak convergence) monotonicity violated");
    // Item 3 (uniform bound), C = 1 for the self-adjoint contraction kinds.
    for (size_t k = 0; k < ks.size(); ++k)
        if (rep.max_norm_ratio[k] > 1.0 + 1e-10)
            throw InvariantError("regularization suite: item 3 operator-norm bound violated");

    // Log-slope of the residual for a smooth vector: lowest nonzero mode.
    int lowest = -1;
    for (int k = 0; k < A.eigenvalues.size(); ++k)
        if (A.eigenvalues(k) > 1e-8) {
            lowest = k;
            break;
        }
    if (lowest >= 0) {
        const Eigen::VectorXd smooth = A.eigenvectors.col(lowest);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t k = 0; k < ks.size(); ++k) {
            const double res = (resolvent_apply(A, smooth, ks[k]) - smooth).norm();
            const double lx = std::log10(ks[k]), ly = std::log10(std::max(res, 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double m = static_cast<double>(ks.size());
        rep.smooth_log_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return rep;
}

}  // namespace anisokin
