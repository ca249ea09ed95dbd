#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cpcf/grid.hpp"
#include "cpcf/image.hpp"

namespace cpcf {

// Multi-channel feature tensor on a cell grid; channel-major planes so each
// channel can be handed to the FFT path as one contiguous Grid2D.
struct FeatureMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t channels = 0;
    std::vector<double> values;

    FeatureMap() = default;
    FeatureMap(std::size_t r, std::size_t c, std::size_t d)
        : rows(r), cols(c), channels(d), values(r * c * d, 0.0) {}

    double& at(std::size_t c, std::size_t i, std::size_t j) {
        return values[(c * rows + i) * cols + j];
    }
    double at(std::size_t c, std::size_t i, std::size_t j) const {
        return values[(c * rows + i) * cols + j];
    }

    Grid2D channel(std::size_t c) const;
};

// 32768-entry color-name lookup: RGB quantized to 5 bits per channel,
// row index (r5 << 10) | (g5 << 5) | b5, 11 probabilities per row
// (alphabetical: black, blue, brown, grey, green, orange, pink, purple,
// red, white, yellow), each row summing to 1.
class ColorNamesTable {
public:
    static constexpr std::size_t kRows = 32 * 32 * 32;
    static constexpr std::size_t kNames = 11;

    // Procedurally generated table: softmax over negative squared RGB
    // distances to the 11 prototype colors.
    static const ColorNamesTable& builtin();

    static ColorNamesTable load(const std::string& path);
    void save(const std::string& path) const;

    const float* row(std::size_t r5, std::size_t g5, std::size_t b5) const {
        return data_.data() + ((r5 << 10) | (g5 << 5) | b5) * kNames;
    }
    const float* row_rgb(float r, float g, float b) const;

private:
    std::vector<float> data_;
    friend ColorNamesTable make_builtin_table();
};

// Crops a (patch_rows x patch_cols) region centered at a continuous pixel
// coordinate and resizes it to out_rows x out_cols with bilinear sampling;
// coordinates outside the image replicate the nearest edge pixel.  With
// matching sizes and an aligned center the crop is an exact pixel copy.
Image extract_patch(const Image& img, double center_row, double center_col,
                    double patch_rows, double patch_cols, std::size_t out_rows,
                    std::size_t out_cols);

// 31-channel HOG on a cell grid: 18 contrast-sensitive orientation bins,
// 9 contrast-insensitive bins, 4 normalization-block texture channels,
// each block-normalized and clipped at 0.2.  Border cells reuse clamped
// neighbor blocks instead of being cropped, so the cell grid covers the
// whole patch.  Patch dimensions must be positive; they are replicate-padded
// up to a multiple of cell_size.
FeatureMap hog_features(const Image& patch, std::size_t cell_size);

// 11-channel color-name probabilities averaged over cells, matching the HOG
// cell grid.  Throws std::invalid_argument for gray input (the caller
// substitutes an intensity channel instead).
FeatureMap cn_features(const Image& patch, std::size_t cell_size,
                       const ColorNamesTable& table = ColorNamesTable::builtin());

// Cell-mean intensity minus 0.5, one channel on the HOG cell grid.
FeatureMap gray_features(const Image& patch, std::size_t cell_size);

struct FeatureConfig {
    std::size_t cell_size = 4;
    // Search region area as a multiple of target area.
    double padding_area = 4.0;
    // Model patches larger than this are scaled down before extraction.
    std::size_t max_model_area = 200 * 200;
    const ColorNamesTable* cn_table = nullptr;  // nullptr -> builtin
};

struct SampleGeometry {
    double center_row = 0.0;
    double center_col = 0.0;
    double patch_rows = 0.0;  // region size in image pixels
    double patch_cols = 0.0;
    std::size_t model_rows = 0;  // resized patch size; multiples of cell_size
    std::size_t model_cols = 0;
};

// Full feature sample: HOG (31) + color names (11, RGB only) + centered
// intensity (1), every channel multiplied by a Hann window; D = 43 for RGB
// input and 32 for gray.
FeatureMap build_sample(const Image& img, const SampleGeometry& geom,
                        const FeatureConfig& cfg);

}  // namespace cpcf
