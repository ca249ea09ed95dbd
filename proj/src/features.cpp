#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpcf/features.hpp"
#include "cpcf/signal.hpp"

namespace cpcf {

Grid2D FeatureMap::channel(std::size_t c) const {
    Grid2D out(rows, cols);
    const double* plane = values.data() + c * rows * cols;
    std::copy(plane, plane + rows * cols, out.data());
    return out;
}

Image extract_patch(const Image& img, double center_row, double center_col,
                    double patch_rows, double patch_cols, std::size_t out_rows,
                    std::size_t out_cols) {
    if (img.empty()) throw std::invalid_argument("extract_patch: empty image");
    if (!(patch_rows > 0.0) || !(patch_cols > 0.0))
        throw std::invalid_argument("extract_patch: non-positive patch size");
    if (out_rows == 0 || out_cols == 0)
        throw std::invalid_argument("extract_patch: empty output size");

    Image out(out_rows, out_cols, img.channels);
    const double row_scale = patch_rows / static_cast<double>(out_rows);
    const double col_scale = patch_cols / static_cast<double>(out_cols);
    const double top = center_row - patch_rows / 2.0;
    const double left = center_col - patch_cols / 2.0;
    const double max_i = static_cast<double>(img.height - 1);
    const double max_j = static_cast<double>(img.width - 1);

    for (std::size_t oi = 0; oi < out_rows; ++oi) {
        // Pixel centers of the source region; clamping replicates edges.
        double si = top + (static_cast<double>(oi) + 0.5) * row_scale;
        si = std::clamp(si, 0.0, max_i);
        const auto i0 = static_cast<std::size_t>(si);
        const std::size_t i1 = std::min(i0 + 1, img.height - 1);
        const double fi = si - static_cast<double>(i0);
        for (std::size_t oj = 0; oj < out_cols; ++oj) {
            double sj = left + (static_cast<double>(oj) + 0.5) * col_scale;
            sj = std::clamp(sj, 0.0, max_j);
            const auto j0 = static_cast<std::size_t>(sj);
            const std::size_t j1 = std::min(j0 + 1, img.width - 1);
            const double fj = sj - static_cast<double>(j0);
            for (std::size_t c = 0; c < img.channels; ++c) {
                const double v00 = img.at(i0, j0, c);
                const double v01 = img.at(i0, j1, c);
                const double v10 = img.at(i1, j0, c);
                const double v11 = img.at(i1, j1, c);
                const double v = (1.0 - fi) * ((1.0 - fj) * v00 + fj * v01) +
                                 fi * ((1.0 - fj) * v10 + fj * v11);
                out.at(oi, oj, c) = static_cast<float>(v);
            }
        }
    }
    return out;
}

namespace {

// Replicate-pad so both dimensions are multiples of the cell size.
Image pad_to_cells(const Image& patch, std::size_t cell) {
    const std::size_t rows = (patch.height + cell - 1) / cell * cell;
    const std::size_t cols = (patch.width + cell - 1) / cell * cell;
    if (rows == patch.height && cols == patch.width) return patch;
    Image out(rows, cols, patch.channels);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t si = std::min(i, patch.height - 1);
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t sj = std::min(j, patch.width - 1);
            for (std::size_t c = 0; c < patch.channels; ++c)
                out.at(i, j, c) = patch.at(si, sj, c);
        }
    }
    return out;
}

// Unit vectors for the 9 contrast-insensitive orientation bins; a signed
// gradient snaps to the bin (0..17) whose dot product is largest.
constexpr double kBinU[9] = {1.0000, 0.9397, 0.7660, 0.5000, 0.1736,
                             -0.1736, -0.5000, -0.7660, -0.9397};
constexpr double kBinV[9] = {0.0000, 0.3420, 0.6428, 0.8660, 0.9848,
                             0.9848, 0.8660, 0.6428, 0.3420};

constexpr double kClip = 0.2;
constexpr double kNormEps = 1e-4;
// Texture channel weight, 1 / (2 * sqrt(#signed bins / 4)).
const double kTextureWeight = 1.0 / std::sqrt(18.0);

}  // namespace

FeatureMap hog_features(const Image& patch, std::size_t cell_size) {
    if (cell_size == 0) throw std::invalid_argument("hog: zero cell size");
    if (patch.empty()) throw std::invalid_argument("hog: empty patch");
    const Image img = pad_to_cells(patch, cell_size);
    const std::size_t cells_r = img.height / cell_size;
    const std::size_t cells_c = img.width / cell_size;

    // Orientation histogram: 18 signed bins per cell, pixel votes spread
    // bilinearly over the four nearest cell centers.
    std::vector<double> hist(cells_r * cells_c * 18, 0.0);
    auto hist_at = [&](std::size_t i, std::size_t j, std::size_t o) -> double& {
        return hist[(i * cells_c + j) * 18 + o];
    };

    const std::size_t H = img.height, W = img.width;
    for (std::size_t y = 0; y < H; ++y) {
        const std::size_t ym = y > 0 ? y - 1 : 0;
        const std::size_t yp = std::min(y + 1, H - 1);
        for (std::size_t x = 0; x < W; ++x) {
            const std::size_t xm = x > 0 ? x - 1 : 0;
            const std::size_t xp = std::min(x + 1, W - 1);
            // Strongest color channel wins, by gradient energy.
            double dx = 0.0, dy = 0.0, best_mag = -1.0;
            for (std::size_t c = 0; c < img.channels; ++c) {
                const double cdx = img.at(y, xp, c) - img.at(y, xm, c);
                const double cdy = img.at(yp, x, c) - img.at(ym, x, c);
                const double mag = cdx * cdx + cdy * cdy;
                if (mag > best_mag) {
                    best_mag = mag;
                    dx = cdx;
                    dy = cdy;
                }
            }
            double best_dot = 0.0;
            std::size_t best_o = 0;
            for (std::size_t o = 0; o < 9; ++o) {
                const double dot = kBinU[o] * dx + kBinV[o] * dy;
                if (dot > best_dot) {
                    best_dot = dot;
                    best_o = o;
                } else if (-dot > best_dot) {
                    best_dot = -dot;
                    best_o = o + 9;
                }
            }
            const double mag = std::sqrt(best_mag);

            const double cy =
                (static_cast<double>(y) + 0.5) / static_cast<double>(cell_size) -
                0.5;
            const double cx =
                (static_cast<double>(x) + 0.5) / static_cast<double>(cell_size) -
                0.5;
            const auto iy = static_cast<long>(std::floor(cy));
            const auto ix = static_cast<long>(std::floor(cx));
            const double fy = cy - static_cast<double>(iy);
            const double fx = cx - static_cast<double>(ix);
            const long rc = static_cast<long>(cells_r);
            const long cc = static_cast<long>(cells_c);
            auto vote = [&](long i, long j, double w) {
                if (i >= 0 && i < rc && j >= 0 && j < cc)
                    hist_at(static_cast<std::size_t>(i),
                            static_cast<std::size_t>(j), best_o) += w * mag;
            };
            vote(iy, ix, (1.0 - fy) * (1.0 - fx));
            vote(iy, ix + 1, (1.0 - fy) * fx);
            vote(iy + 1, ix, fy * (1.0 - fx));
            vote(iy + 1, ix + 1, fy * fx);
        }
    }

    // Gradient energy per cell over the 9 unsigned orientations.
    std::vector<double> energy(cells_r * cells_c, 0.0);
    for (std::size_t i = 0; i < cells_r; ++i)
        for (std::size_t j = 0; j < cells_c; ++j) {
            double e = 0.0;
            for (std::size_t o = 0; o < 9; ++o) {
                const double s = hist_at(i, j, o) + hist_at(i, j, o + 9);
                e += s * s;
            }
            energy[i * cells_c + j] = e;
        }

    auto energy_clamped = [&](long i, long j) {
        i = std::clamp(i, 0L, static_cast<long>(cells_r) - 1);
        j = std::clamp(j, 0L, static_cast<long>(cells_c) - 1);
        return energy[static_cast<std::size_t>(i) * cells_c +
                      static_cast<std::size_t>(j)];
    };

    FeatureMap out(cells_r, cells_c, 31);
    for (std::size_t i = 0; i < cells_r; ++i) {
        for (std::size_t j = 0; j < cells_c; ++j) {
            const long li = static_cast<long>(i), lj = static_cast<long>(j);
            // Four 2x2 normalization blocks around the cell; border cells
            // clamp neighbor indices instead of being dropped.
            double norm[4];
            std::size_t k = 0;
            for (long di = -1; di <= 0; ++di)
                for (long dj = -1; dj <= 0; ++dj)
                    norm[k++] = 1.0 / std::sqrt(
                        energy_clamped(li + di, lj + dj) +
                        energy_clamped(li + di, lj + dj + 1) +
                        energy_clamped(li + di + 1, lj + dj) +
                        energy_clamped(li + di + 1, lj + dj + 1) + kNormEps);

            double texture[4] = {0.0, 0.0, 0.0, 0.0};
            for (std::size_t o = 0; o < 18; ++o) {
                const double v = hist_at(i, j, o);
                double sum = 0.0;
                for (std::size_t n = 0; n < 4; ++n) {
                    const double clipped = std::min(v * norm[n], kClip);
                    sum += clipped;
                    texture[n] += clipped;
                }
                out.at(o, i, j) = 0.5 * sum;
            }
            for (std::size_t o = 0; o < 9; ++o) {
                const double v = hist_at(i, j, o) + hist_at(i, j, o + 9);
                double sum = 0.0;
                for (std::size_t n = 0; n < 4; ++n)
                    sum += std::min(v * norm[n], kClip);
                out.at(18 + o, i, j) = 0.5 * sum;
            }
            for (std::size_t n = 0; n < 4; ++n)
                out.at(27 + n, i, j) = kTextureWeight * texture[n];
        }
    }
    return out;
}

FeatureMap cn_features(const Image& patch, std::size_t cell_size,
                       const ColorNamesTable& table) {
    if (patch.channels != 3)
        throw std::invalid_argument(
            "cn_features: color names need RGB input");
    if (cell_size == 0) throw std::invalid_argument("cn: zero cell size");
    const Image img = pad_to_cells(patch, cell_size);
    const std::size_t cells_r = img.height / cell_size;
    const std::size_t cells_c = img.width / cell_size;
    FeatureMap out(cells_r, cells_c, ColorNamesTable::kNames);
    const double inv_area = 1.0 / static_cast<double>(cell_size * cell_size);
    for (std::size_t i = 0; i < img.height; ++i) {
        const std::size_t ci = i / cell_size;
        for (std::size_t j = 0; j < img.width; ++j) {
            const std::size_t cj = j / cell_size;
            const float* probs =
                table.row_rgb(img.at(i, j, 0), img.at(i, j, 1), img.at(i, j, 2));
            for (std::size_t n = 0; n < ColorNamesTable::kNames; ++n)
                out.at(n, ci, cj) += probs[n] * inv_area;
        }
    }
    return out;
}

FeatureMap gray_features(const Image& patch, std::size_t cell_size) {
    if (cell_size == 0) throw std::invalid_argument("gray: zero cell size");
    const Image img = pad_to_cells(to_gray(patch), cell_size);
    const std::size_t cells_r = img.height / cell_size;
    const std::size_t cells_c = img.width / cell_size;
    FeatureMap out(cells_r, cells_c, 1);
    const double inv_area = 1.0 / static_cast<double>(cell_size * cell_size);
    for (std::size_t i = 0; i < img.height; ++i)
        for (std::size_t j = 0; j < img.width; ++j)
            out.at(0, i / cell_size, j / cell_size) +=
                img.at(i, j) * inv_area;
    for (double& v : out.values) v -= 0.5;
    return out;
}

FeatureMap build_sample(const Image& img, const SampleGeometry& geom,
                        const FeatureConfig& cfg) {
    if (geom.model_rows == 0 || geom.model_cols == 0)
        throw std::invalid_argument("build_sample: empty model size");
    if (geom.model_rows % cfg.cell_size != 0 ||
        geom.model_cols % cfg.cell_size != 0)
        throw std::invalid_argument(
            "build_sample: model size must be a multiple of the cell size");

    const Image patch =
        extract_patch(img, geom.center_row, geom.center_col, geom.patch_rows,
                      geom.patch_cols, geom.model_rows, geom.model_cols);

    const FeatureMap hog = hog_features(patch, cfg.cell_size);
    const bool color = patch.channels == 3;
    const ColorNamesTable& table =
        cfg.cn_table ? *cfg.cn_table : ColorNamesTable::builtin();
    const FeatureMap chroma = color ? cn_features(patch, cfg.cell_size, table)
                                    : FeatureMap();
    const FeatureMap gray = gray_features(patch, cfg.cell_size);

    const std::size_t rows = hog.rows, cols = hog.cols;
    const std::size_t D = hog.channels + chroma.channels + gray.channels;
    FeatureMap out(rows, cols, D);
    std::size_t offset = 0;
    for (const FeatureMap* part : {&hog, &chroma, &gray}) {
        std::copy(part->values.begin(), part->values.end(),
                  out.values.begin() +
                      static_cast<std::ptrdiff_t>(offset * rows * cols));
        offset += part->channels;
    }

    const Grid2D window = hann_window(rows, cols);
    for (std::size_t c = 0; c < D; ++c)
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                out.at(c, i, j) *= window(i, j);
    return out;
}

}  // namespace cpcf
