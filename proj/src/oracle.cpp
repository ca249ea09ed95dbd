#include "cpcf/oracle.hpp"

#include <Eigen/Dense>

#include "cpcf/signal.hpp"

namespace cpcf {

namespace {

// Dense circulant of the 2-D cyclic convolution by v: row (i,j), column
// (i',j') holds v((i-i') mod M, (j-j') mod N).
Eigen::MatrixXd circulant(const Grid2D& v) {
    const std::size_t M = v.rows(), N = v.cols();
    const std::size_t n = M * N;
    Eigen::MatrixXd C(n, n);
    for (std::size_t ti = 0; ti < M; ++ti)
        for (std::size_t tj = 0; tj < N; ++tj)
            for (std::size_t ui = 0; ui < M; ++ui)
                for (std::size_t uj = 0; uj < N; ++uj)
                    C(ti * N + tj, ui * N + uj) =
                        v((ti + M - ui) % M, (tj + N - uj) % N);
    return C;
}

Eigen::VectorXd flatten(const Grid2D& g) {
    Eigen::VectorXd v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v(k) = g[k];
    return v;
}

}  // namespace

std::vector<Grid2D> oracle_solve(const TrainingProblem& p) {
    const std::size_t D = p.x_hat.size();
    if (D == 0) throw std::invalid_argument("oracle_solve: no channels");
    const std::size_t M = p.y_hat.rows(), N = p.y_hat.cols();
    const std::size_t cells = M * N;
    if (D * cells > 2048)
        throw std::invalid_argument("oracle_solve: problem too large");

    const bool has_r = p.r_hat.has_value() && p.gamma > 0.0;
    if (has_r && !p.l_hat.has_value())
        throw std::invalid_argument("oracle_solve: r_hat present without l_hat");

    std::vector<Eigen::MatrixXd> X(D);
    for (std::size_t d = 0; d < D; ++d) X[d] = circulant(idft2(p.x_hat[d]));
    const Eigen::VectorXd y = flatten(idft2(p.y_hat));

    // G = I + gamma R R^T folds both data terms into one quadratic kernel.
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(cells, cells);
    Eigen::VectorXd rhs_core = y;
    if (has_r) {
        const Eigen::MatrixXd R = circulant(idft2(*p.r_hat));
        const Eigen::VectorXd l = flatten(idft2(*p.l_hat));
        G += p.gamma * R * R.transpose();
        rhs_core += p.gamma * R * l;
    }

    Eigen::VectorXd s2 = flatten(p.spatial_weight.grid);
    s2 = s2.cwiseProduct(s2);

    Eigen::MatrixXd A(D * cells, D * cells);
    Eigen::VectorXd b(D * cells);
    for (std::size_t d = 0; d < D; ++d) {
        const Eigen::MatrixXd XdTG = X[d].transpose() * G;
        for (std::size_t e = 0; e < D; ++e) {
            A.block(d * cells, e * cells, cells, cells) = XdTG * X[e];
            if (d == e)
                A.block(d * cells, e * cells, cells, cells) +=
                    s2.asDiagonal().toDenseMatrix();
        }
        b.segment(d * cells, cells) = X[d].transpose() * rhs_core;
    }

    const Eigen::VectorXd w = A.ldlt().solve(b);
    std::vector<Grid2D> out(D, Grid2D(M, N));
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t k = 0; k < cells; ++k) out[d][k] = w(d * cells + k);
    return out;
}

std::vector<std::complex<double>> dense_bin_solve(
    const std::vector<std::complex<double>>& x, std::complex<double> y,
    bool has_r, std::complex<double> r, std::complex<double> l, double gamma,
    const std::vector<std::complex<double>>& zeta,
    const std::vector<std::complex<double>>& w, double nu) {
    const std::size_t D = x.size();
    const double g_eff = has_r ? gamma : 0.0;
    const double rho = has_r ? std::norm(r) : 0.0;
    const double coeff = 1.0 + g_eff * rho;
    const std::complex<double> t = y + g_eff * r * l;

    Eigen::VectorXcd p(D), b(D);
    for (std::size_t d = 0; d < D; ++d) {
        p(d) = std::conj(x[d]);
        b(d) = std::conj(x[d]) * t - zeta[d] + nu * w[d];
    }
    Eigen::MatrixXcd A = coeff * (p * p.adjoint());
    A += nu * Eigen::MatrixXcd::Identity(D, D);
    const Eigen::VectorXcd g = A.fullPivLu().solve(b);
    return {g.data(), g.data() + D};
}

}  // namespace cpcf
