#pragma once

#include <complex>
#include <vector>

#include "cpcf/solver.hpp"

namespace cpcf {

// Direct dense solve of the training normal equations
//   (X^T X + S^T S + gamma X^T R R^T X) w = X^T y + gamma X^T R l
// built from explicit circulant matrices. Test-scale anti-regression oracle
// for solve_filter; refuses problems with more than 2048 unknowns.
std::vector<Grid2D> oracle_solve(const TrainingProblem& p);

// Dense D x D solve of a single frequency bin's system, the slow reference
// for the rank-1 fast path in solve_bin.
std::vector<std::complex<double>> dense_bin_solve(
    const std::vector<std::complex<double>>& x, std::complex<double> y,
    bool has_r, std::complex<double> r, std::complex<double> l, double gamma,
    const std::vector<std::complex<double>>& zeta,
    const std::vector<std::complex<double>>& w, double nu);

}  // namespace cpcf
