#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace cpcf {

// Dense row-major image with interleaved channels; 1 (gray) or 3 (RGB)
// channels, values in [0, 1].
struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 1;
    std::vector<float> pixels;

    Image() = default;
    Image(std::size_t h, std::size_t w, std::size_t c, float fill = 0.0f)
        : height(h), width(w), channels(c), pixels(h * w * c, fill) {}

    float& at(std::size_t i, std::size_t j, std::size_t c = 0) {
        assert(i < height && j < width && c < channels);
        return pixels[(i * width + j) * channels + c];
    }
    float at(std::size_t i, std::size_t j, std::size_t c = 0) const {
        assert(i < height && j < width && c < channels);
        return pixels[(i * width + j) * channels + c];
    }

    bool empty() const { return pixels.empty(); }
};

// Channel-mean intensity in [0, 1]; identity for gray input.
inline Image to_gray(const Image& img) {
    if (img.channels == 1) return img;
    Image out(img.height, img.width, 1);
    for (std::size_t i = 0; i < img.height; ++i)
        for (std::size_t j = 0; j < img.width; ++j)
            out.at(i, j) =
                (img.at(i, j, 0) + img.at(i, j, 1) + img.at(i, j, 2)) / 3.0f;
    return out;
}

}  // namespace cpcf
