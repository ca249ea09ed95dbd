#include "cpcf/signal.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace cpcf {

namespace {

struct PlanKey {
    int rows;
    int cols;
    int sign;
    bool operator==(const PlanKey& o) const {
        return rows == o.rows && cols == o.cols && sign == o.sign;
    }
};

struct PlanKeyHash {
    std::size_t operator()(const PlanKey& k) const {
        return (static_cast<std::size_t>(k.rows) * 73856093u) ^
               (static_cast<std::size_t>(k.cols) * 19349663u) ^
               static_cast<std::size_t>(k.sign == FFTW_FORWARD ? 1 : 2);
    }
};

// Plans are created once per (rows, cols, direction) under a lock and reused;
// fftw_execute_dft itself is reentrant. FFTW_UNALIGNED lets one plan serve
// arbitrary caller buffers.
class PlanCache {
public:
    fftw_plan get(int rows, int cols, int sign) {
        const PlanKey key{rows, cols, sign};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(
            static_cast<std::size_t>(rows) * cols);
        fftw_complex* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_2d(rows, cols, buf, buf, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fft: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::unordered_map<PlanKey, fftw_plan, PlanKeyHash> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void execute(fftw_plan plan, std::complex<double>* in, std::complex<double>* out) {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

Spectrum2D dft2(const Grid2D& g) {
    if (g.empty()) throw std::invalid_argument("dft2: empty grid");
    const std::size_t M = g.rows(), N = g.cols();
    Spectrum2D in(M, N), out(M, N);
    for (std::size_t k = 0; k < g.size(); ++k) in[k] = g[k];
    fftw_plan plan = plan_cache().get(static_cast<int>(M), static_cast<int>(N),
                                      FFTW_FORWARD);
    execute(plan, in.data(), out.data());
    return out;
}

Grid2D idft2(const Spectrum2D& s) {
    if (s.empty()) throw std::invalid_argument("idft2: empty spectrum");
    const std::size_t M = s.rows(), N = s.cols();
    Spectrum2D in = s, out(M, N);
    fftw_plan plan = plan_cache().get(static_cast<int>(M), static_cast<int>(N),
                                      FFTW_BACKWARD);
    execute(plan, in.data(), out.data());
    const double scale = 1.0 / static_cast<double>(M * N);
    Grid2D result(M, N);
    double max_imag = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const std::complex<double> v = out[k] * scale;
        max_imag = std::max(max_imag, std::abs(v.imag()));
        result[k] = v.real();
    }
    if (max_imag >= 1e-8)
        throw std::runtime_error("idft2: non-negligible imaginary residue; "
                                 "input spectrum is not conjugate-symmetric");
    return result;
}

Grid2D cyclic_correlate(const Grid2D& a, const Grid2D& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("cyclic_correlate: dimension mismatch");
    return idft2(conj_mul(dft2(a), dft2(b)));
}

Grid2D circ_shift(const Grid2D& g, ShiftVector s) {
    const std::size_t M = g.rows(), N = g.cols();
    const long du = ((s.du % static_cast<long>(M)) + static_cast<long>(M)) %
                    static_cast<long>(M);
    const long dv = ((s.dv % static_cast<long>(N)) + static_cast<long>(N)) %
                    static_cast<long>(N);
    Grid2D out(M, N);
    for (std::size_t i = 0; i < M; ++i) {
        const std::size_t si = (i + M - static_cast<std::size_t>(du)) % M;
        for (std::size_t j = 0; j < N; ++j) {
            const std::size_t sj = (j + N - static_cast<std::size_t>(dv)) % N;
            out(i, j) = g(si, sj);
        }
    }
    return out;
}

Grid2D gaussian_label(std::size_t rows, std::size_t cols, double sigma,
                      std::size_t center_row, std::size_t center_col) {
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_label: sigma <= 0");
    if (center_row >= rows || center_col >= cols)
        throw std::invalid_argument("gaussian_label: center outside grid");
    Grid2D y(rows, cols);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t i = 0; i < rows; ++i) {
        const double ai = std::abs(static_cast<double>(i) -
                                   static_cast<double>(center_row));
        const double di = std::min(ai, static_cast<double>(rows) - ai);
        for (std::size_t j = 0; j < cols; ++j) {
            const double aj = std::abs(static_cast<double>(j) -
                                       static_cast<double>(center_col));
            const double dj = std::min(aj, static_cast<double>(cols) - aj);
            y(i, j) = std::exp(-(di * di + dj * dj) * inv);
        }
    }
    y(center_row, center_col) = 1.0;
    return y;
}

Grid2D hann_window(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("hann_window: empty dimensions");
    auto axis = [](std::size_t n) {
        std::vector<double> h(n, 1.0);
        if (n > 1) {
            for (std::size_t i = 0; i < n; ++i)
                h[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                             static_cast<double>(n - 1)));
        }
        return h;
    };
    const std::vector<double> hr = axis(rows), hc = axis(cols);
    Grid2D w(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) w(i, j) = hr[i] * hc[j];
    return w;
}

Spectrum2D conj_mul(const Spectrum2D& a, const Spectrum2D& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("conj_mul: dimension mismatch");
    Spectrum2D out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::conj(a[k]) * b[k];
    return out;
}

Spectrum2D mul(const Spectrum2D& a, const Spectrum2D& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mul: dimension mismatch");
    Spectrum2D out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

}  // namespace cpcf
