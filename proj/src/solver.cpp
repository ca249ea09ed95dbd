#include "cpcf/solver.hpp"

#include <cmath>

#include "cpcf/signal.hpp"

namespace cpcf {

namespace {

void check_channels(const char* who, std::size_t channels, std::size_t rows,
                    std::size_t cols, const std::vector<Spectrum2D>& s) {
    if (s.size() != channels)
        throw std::invalid_argument(std::string(who) + ": channel count mismatch");
    for (const auto& c : s)
        if (c.rows() != rows || c.cols() != cols)
            throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

bool all_finite(const std::vector<Grid2D>& w) {
    for (const auto& ch : w)
        for (double v : ch)
            if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

FilterStack make_filter_stack(std::size_t channels, std::size_t rows,
                              std::size_t cols, double nu) {
    FilterStack s;
    s.w.assign(channels, Grid2D(rows, cols, 0.0));
    s.g_hat.assign(channels, Spectrum2D(rows, cols, {0.0, 0.0}));
    s.zeta_hat.assign(channels, Spectrum2D(rows, cols, {0.0, 0.0}));
    s.nu = nu;
    return s;
}

void solve_bin(const std::complex<double>* x, std::size_t channels,
               std::complex<double> y, bool has_r, std::complex<double> r,
               std::complex<double> l, double gamma,
               const std::complex<double>* zeta, const std::complex<double>* w,
               double nu, std::complex<double>* g_out) {
    const double g_eff = has_r ? gamma : 0.0;
    const double rho = has_r ? std::norm(r) : 0.0;
    const double coeff = 1.0 + g_eff * rho;
    const std::complex<double> t = y + g_eff * r * l;

    double sx = 0.0;
    std::complex<double> s{0.0, 0.0};
    for (std::size_t d = 0; d < channels; ++d) {
        const std::complex<double> b = std::conj(x[d]) * t - zeta[d] + nu * w[d];
        sx += std::norm(x[d]);
        s += x[d] * b;
        g_out[d] = b;
    }
    const std::complex<double> scale = coeff * s / (nu + coeff * sx);
    const double inv_nu = 1.0 / nu;
    for (std::size_t d = 0; d < channels; ++d)
        g_out[d] = (g_out[d] - std::conj(x[d]) * scale) * inv_nu;
}

std::vector<Grid2D> subproblem_w(const SpatialWeight& s,
                                 const std::vector<Spectrum2D>& g_hat,
                                 const std::vector<Spectrum2D>& zeta_hat,
                                 double nu) {
    if (nu <= 0.0) throw std::invalid_argument("subproblem_w: nu <= 0");
    const std::size_t rows = s.grid.rows(), cols = s.grid.cols();
    check_channels("subproblem_w", g_hat.size(), rows, cols, g_hat);
    check_channels("subproblem_w", g_hat.size(), rows, cols, zeta_hat);

    std::vector<Grid2D> w;
    w.reserve(g_hat.size());
    for (std::size_t d = 0; d < g_hat.size(); ++d) {
        Grid2D g = idft2(g_hat[d]);
        Grid2D zeta = idft2(zeta_hat[d]);
        Grid2D wd(rows, cols);
        for (std::size_t k = 0; k < wd.size(); ++k)
            wd[k] = (zeta[k] + nu * g[k]) /
                    (s.grid[k] * s.grid[k] + nu);
        w.push_back(std::move(wd));
    }
    return w;
}

std::vector<Spectrum2D> subproblem_g(const TrainingProblem& p,
                                     const std::vector<Spectrum2D>& w_hat,
                                     const std::vector<Spectrum2D>& zeta_hat,
                                     double nu) {
    if (nu <= 0.0) throw std::invalid_argument("subproblem_g: nu <= 0");
    const std::size_t D = p.x_hat.size();
    if (D == 0) throw std::invalid_argument("subproblem_g: no channels");
    const std::size_t rows = p.y_hat.rows(), cols = p.y_hat.cols();
    check_channels("subproblem_g", D, rows, cols, p.x_hat);
    check_channels("subproblem_g", D, rows, cols, w_hat);
    check_channels("subproblem_g", D, rows, cols, zeta_hat);
    const bool has_r = p.r_hat.has_value() && p.gamma > 0.0;
    if (has_r && !p.l_hat.has_value())
        throw std::invalid_argument("subproblem_g: r_hat present without l_hat");

    std::vector<Spectrum2D> g_hat(D, Spectrum2D(rows, cols));
    std::vector<std::complex<double>> x(D), zeta(D), w(D), g(D);
    const std::size_t bins = rows * cols;
    for (std::size_t n = 0; n < bins; ++n) {
        for (std::size_t d = 0; d < D; ++d) {
            x[d] = p.x_hat[d][n];
            zeta[d] = zeta_hat[d][n];
            w[d] = w_hat[d][n];
        }
        const std::complex<double> r = has_r ? (*p.r_hat)[n] : 0.0;
        const std::complex<double> l = has_r ? (*p.l_hat)[n] : 0.0;
        solve_bin(x.data(), D, p.y_hat[n], has_r, r, l, p.gamma, zeta.data(),
                  w.data(), nu, g.data());
        for (std::size_t d = 0; d < D; ++d) g_hat[d][n] = g[d];
    }
    return g_hat;
}

std::vector<Spectrum2D> lagrangian_update(std::vector<Spectrum2D> zeta_hat,
                                          const std::vector<Spectrum2D>& g_hat,
                                          const std::vector<Spectrum2D>& w_hat,
                                          double nu) {
    for (std::size_t d = 0; d < zeta_hat.size(); ++d)
        for (std::size_t k = 0; k < zeta_hat[d].size(); ++k)
            zeta_hat[d][k] += nu * (g_hat[d][k] - w_hat[d][k]);
    return zeta_hat;
}

FilterStack solve_filter(const TrainingProblem& p, FilterStack stack,
                         std::size_t iters, const AdmmParams& params) {
    if (iters == 0) throw std::invalid_argument("solve_filter: iters == 0");
    if (p.gamma < 0.0) throw std::invalid_argument("solve_filter: gamma < 0");
    const std::size_t D = p.x_hat.size();
    const std::size_t rows = p.y_hat.rows(), cols = p.y_hat.cols();
    if (p.spatial_weight.grid.rows() != rows ||
        p.spatial_weight.grid.cols() != cols)
        throw std::invalid_argument("solve_filter: spatial weight dimension mismatch");
    if (stack.w.size() != D)
        throw std::invalid_argument("solve_filter: stack channel mismatch");

    std::vector<Spectrum2D> w_hat(D);
    for (std::size_t d = 0; d < D; ++d) w_hat[d] = dft2(stack.w[d]);

    for (std::size_t it = 0; it < iters; ++it) {
        stack.g_hat = subproblem_g(p, w_hat, stack.zeta_hat, stack.nu);
        stack.w = subproblem_w(p.spatial_weight, stack.g_hat, stack.zeta_hat,
                               stack.nu);
        if (!all_finite(stack.w))
            throw SolverDivergence("solve_filter: non-finite filter values");
        for (std::size_t d = 0; d < D; ++d) w_hat[d] = dft2(stack.w[d]);
        stack.zeta_hat =
            lagrangian_update(std::move(stack.zeta_hat), stack.g_hat, w_hat,
                              stack.nu);
        stack.nu = std::min(params.nu_max, params.nu_scale * stack.nu);
    }
    return stack;
}

SpatialWeight spatial_weight(double target_rows_cells, double target_cols_cells,
                             std::size_t rows, std::size_t cols, double mu,
                             double theta) {
    if (mu <= 0.0) throw std::invalid_argument("spatial_weight: mu <= 0");
    if (theta < 0.0) throw std::invalid_argument("spatial_weight: theta < 0");
    if (target_rows_cells <= 0.0 || target_cols_cells <= 0.0)
        throw std::invalid_argument("spatial_weight: non-positive target size");
    if (target_rows_cells > static_cast<double>(rows) ||
        target_cols_cells > static_cast<double>(cols))
        throw std::invalid_argument("spatial_weight: target larger than grid");

    const double P = target_rows_cells / 2.0;
    const double Q = target_cols_cells / 2.0;
    const double cr = static_cast<double>(rows / 2);
    const double cc = static_cast<double>(cols / 2);
    SpatialWeight s{Grid2D(rows, cols)};
    for (std::size_t i = 0; i < rows; ++i) {
        const double di = (static_cast<double>(i) - cr) / P;
        for (std::size_t j = 0; j < cols; ++j) {
            const double dj = (static_cast<double>(j) - cc) / Q;
            s.grid(i, j) = mu + theta * (di * di + dj * dj);
        }
    }
    return s;
}

}  // namespace cpcf
