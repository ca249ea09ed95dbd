#include "cpcf/consistency.hpp"

#include <cmath>
#include <stdexcept>

#include "cpcf/signal.hpp"

namespace cpcf {

ResponseMap::ResponseMap(Grid2D g) : grid(std::move(g)) {
    if (grid.empty()) throw std::invalid_argument("ResponseMap: empty grid");
    peak_value = grid[0];
    std::size_t flat = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (grid[k] > peak_value) {
            peak_value = grid[k];
            flat = k;
        }
    }
    peak_pos = {flat / grid.cols(), flat % grid.cols()};
}

Grid2D recenter_to_origin(const ResponseMap& resp) {
    return circ_shift(resp.grid, {-static_cast<int>(resp.peak_pos.row),
                                  -static_cast<int>(resp.peak_pos.col)});
}

ConsistencyMap consistency_map(const ResponseMap& target_resp,
                               const ResponseMap& detect_resp) {
    if (!target_resp.grid.same_shape(detect_resp.grid))
        throw std::invalid_argument("consistency_map: dimension mismatch");
    return {cyclic_correlate(recenter_to_origin(detect_resp),
                             target_resp.grid)};
}

Grid2D fixed_label(const Grid2D& y) {
    ResponseMap auto_corr(cyclic_correlate(y, y));
    const int cr = static_cast<int>(y.rows() / 2);
    const int cc = static_cast<int>(y.cols() / 2);
    return circ_shift(auto_corr.grid,
                      {cr - static_cast<int>(auto_corr.peak_pos.row),
                       cc - static_cast<int>(auto_corr.peak_pos.col)});
}

std::size_t peak_window_half(std::size_t dim, double margin) {
    const long h = std::lround(margin * static_cast<double>(dim) / 2.0);
    return static_cast<std::size_t>(std::max(1L, h));
}

Grid2D consistency_reference(const ResponseMap& detection, double margin) {
    const std::size_t M = detection.grid.rows(), N = detection.grid.cols();
    double mean = 0.0;
    for (double v : detection.grid) mean += v;
    mean /= static_cast<double>(detection.grid.size());
    const double span = detection.peak_value - mean;
    if (!(span > 1e-8)) return {};
    const long hr = static_cast<long>(
        std::min(peak_window_half(M, margin), (M - 1) / 2));
    const long hc = static_cast<long>(
        std::min(peak_window_half(N, margin), (N - 1) / 2));
    const long pr = static_cast<long>(detection.peak_pos.row);
    const long pc = static_cast<long>(detection.peak_pos.col);
    const long Ml = static_cast<long>(M), Nl = static_cast<long>(N);
    Grid2D ref(M, N, 0.0);
    for (long di = -hr; di <= hr; ++di)
        for (long dj = -hc; dj <= hc; ++dj) {
            const std::size_t si = static_cast<std::size_t>((pr + di + Ml) % Ml);
            const std::size_t sj = static_cast<std::size_t>((pc + dj + Nl) % Nl);
            const double v = (detection.grid(si, sj) - mean) / span;
            if (v > 0.0)
                ref(static_cast<std::size_t>((di + Ml) % Ml),
                    static_cast<std::size_t>((dj + Nl) % Nl)) = v;
        }
    return ref;
}

PsrmScore psrm(const ResponseMap& resp, double beta, double sidelobe_margin) {
    const std::size_t M = resp.grid.rows(), N = resp.grid.cols();
    const std::size_t hr = peak_window_half(M, sidelobe_margin);
    const std::size_t hc = peak_window_half(N, sidelobe_margin);
    const std::size_t r0 = resp.peak_pos.row > hr ? resp.peak_pos.row - hr : 0;
    const std::size_t r1 = std::min(M - 1, resp.peak_pos.row + hr);
    const std::size_t c0 = resp.peak_pos.col > hc ? resp.peak_pos.col - hc : 0;
    const std::size_t c1 = std::min(N - 1, resp.peak_pos.col + hc);

    auto in_window = [&](std::size_t i, std::size_t j) {
        return i >= r0 && i <= r1 && j >= c0 && j <= c1;
    };
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (!in_window(i, j)) {
                sum += resp.grid(i, j);
                ++count;
            }
    if (count < 2)
        throw std::invalid_argument("psrm: grid too small for the exclusion window");

    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (!in_window(i, j)) {
                const double d = resp.grid(i, j) - mean;
                sq += d * d;
            }
    const double stddev = std::sqrt(sq / static_cast<double>(count));

    PsrmScore s;
    s.peak_part = resp.peak_value;
    s.psr_part = stddev < 1e-8 ? 0.0 : (resp.peak_value - mean) / stddev;
    s.value = s.psr_part + beta * s.peak_part;
    return s;
}

double dynamic_factor(const PsrmScore& score, double h_min, double h_max,
                      double alpha) {
    if (h_min > h_max)
        throw std::invalid_argument("dynamic_factor: h_min > h_max");
    if (alpha <= 0.0) throw std::invalid_argument("dynamic_factor: alpha <= 0");
    const double h = h_min + (score.value / alpha) * (h_max - h_min);
    return std::min(h_max, std::max(h_min, h));
}

ConstraintLabel dynamic_label(double h, const Grid2D& l_f) {
    if (!std::isfinite(h))
        throw std::invalid_argument("dynamic_label: non-finite factor");
    ConstraintLabel label{l_f, h};
    for (auto& v : label.grid) v *= h;
    return label;
}

}  // namespace cpcf
