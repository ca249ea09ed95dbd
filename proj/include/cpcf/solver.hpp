#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cpcf/grid.hpp"

namespace cpcf {

// Thrown when a non-finite value appears during training; the tracker reacts
// by keeping the previous filter for that frame.
struct SolverDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-pixel filter penalty shared across channels; strictly positive so the
// w-subproblem denominator never vanishes.
struct SpatialWeight {
    Grid2D grid;
};

// Multi-channel filter state carried across ADMM iterations: spatial filter w,
// frequency-domain auxiliary variable g_hat, multiplier zeta_hat, penalty nu.
struct FilterStack {
    std::vector<Grid2D> w;
    std::vector<Spectrum2D> g_hat;
    std::vector<Spectrum2D> zeta_hat;
    double nu = 1.0;
};

FilterStack make_filter_stack(std::size_t channels, std::size_t rows,
                              std::size_t cols, double nu = 1.0);

// One frame's training inputs, all in the frequency domain. r_hat is the
// spectrum of the peak-re-centered previous detection response; when absent
// (first frame) the consistency terms are dropped regardless of gamma.
struct TrainingProblem {
    std::vector<Spectrum2D> x_hat;
    Spectrum2D y_hat;
    std::optional<Spectrum2D> r_hat;
    std::optional<Spectrum2D> l_hat;
    double gamma = 0.0;
    SpatialWeight spatial_weight;
};

struct AdmmParams {
    double nu0 = 1.0;
    double nu_scale = 10.0;
    double nu_max = 1e4;
};

// One frequency bin of the g-subproblem: solves
//   ((1 + gamma|r|^2) p p^H + nu I) g = p y + gamma r p l - zeta + nu w,
// with p = conj(x), in O(D) via the rank-1 Sherman-Morrison identity.
void solve_bin(const std::complex<double>* x, std::size_t channels,
               std::complex<double> y, bool has_r, std::complex<double> r,
               std::complex<double> l, double gamma,
               const std::complex<double>* zeta, const std::complex<double>* w,
               double nu, std::complex<double>* g_out);

// Per-channel spatial closed form w = (zeta + nu g) / (s^2 + nu), with g and
// zeta inverse-transformed from the frequency domain.
std::vector<Grid2D> subproblem_w(const SpatialWeight& s,
                                 const std::vector<Spectrum2D>& g_hat,
                                 const std::vector<Spectrum2D>& zeta_hat,
                                 double nu);

// All frequency bins of the g-subproblem.
std::vector<Spectrum2D> subproblem_g(const TrainingProblem& p,
                                     const std::vector<Spectrum2D>& w_hat,
                                     const std::vector<Spectrum2D>& zeta_hat,
                                     double nu);

// zeta <- zeta + nu (g - w), element-wise per channel.
std::vector<Spectrum2D> lagrangian_update(std::vector<Spectrum2D> zeta_hat,
                                          const std::vector<Spectrum2D>& g_hat,
                                          const std::vector<Spectrum2D>& w_hat,
                                          double nu);

// Runs iters rounds of {subproblem_g, subproblem_w, lagrangian_update,
// penalty growth} starting from init; the penalty follows
// nu <- min(nu_max, nu_scale * nu) from init's nu.
FilterStack solve_filter(const TrainingProblem& p, FilterStack init,
                         std::size_t iters, const AdmmParams& params = {});

// Quadratic penalty s(i,j) = mu + theta ((di/P)^2 + (dj/Q)^2) around the grid
// center, where (P, Q) is the half target size in cells.
SpatialWeight spatial_weight(double target_rows_cells, double target_cols_cells,
                             std::size_t rows, std::size_t cols, double mu,
                             double theta);

}  // namespace cpcf
