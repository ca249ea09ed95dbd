#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "cpcf/features.hpp"

namespace cpcf {
namespace {

struct Prototype {
    float r, g, b;
};

// Alphabetical by color name; channel order of every table row.
constexpr std::array<Prototype, ColorNamesTable::kNames> kPrototypes = {{
    {0.00f, 0.00f, 0.00f},  // black
    {0.00f, 0.00f, 1.00f},  // blue
    {0.40f, 0.26f, 0.13f},  // brown
    {0.50f, 0.50f, 0.50f},  // grey
    {0.00f, 0.50f, 0.00f},  // green
    {1.00f, 0.65f, 0.00f},  // orange
    {1.00f, 0.75f, 0.80f},  // pink
    {0.50f, 0.00f, 0.50f},  // purple
    {1.00f, 0.00f, 0.00f},  // red
    {1.00f, 1.00f, 1.00f},  // white
    {1.00f, 1.00f, 0.00f},  // yellow
}};

// Softmax temperature over squared RGB distance; small enough that pure
// prototype colors map almost entirely to their own name.
constexpr double kTemperature = 0.08;

}  // namespace

ColorNamesTable make_builtin_table() {
    ColorNamesTable table;
    table.data_.resize(ColorNamesTable::kRows * ColorNamesTable::kNames);
    for (std::size_t r5 = 0; r5 < 32; ++r5) {
        for (std::size_t g5 = 0; g5 < 32; ++g5) {
            for (std::size_t b5 = 0; b5 < 32; ++b5) {
                // Bin center of the 5-bit quantization cell.
                const double r = (static_cast<double>(r5) + 0.5) / 32.0;
                const double g = (static_cast<double>(g5) + 0.5) / 32.0;
                const double b = (static_cast<double>(b5) + 0.5) / 32.0;
                std::array<double, ColorNamesTable::kNames> score{};
                double total = 0.0;
                for (std::size_t n = 0; n < ColorNamesTable::kNames; ++n) {
                    const double dr = r - kPrototypes[n].r;
                    const double dg = g - kPrototypes[n].g;
                    const double db = b - kPrototypes[n].b;
                    const double d2 = dr * dr + dg * dg + db * db;
                    score[n] = std::exp(-d2 / kTemperature);
                    total += score[n];
                }
                float* row = table.data_.data() +
                             ((r5 << 10) | (g5 << 5) | b5) *
                                 ColorNamesTable::kNames;
                for (std::size_t n = 0; n < ColorNamesTable::kNames; ++n)
                    row[n] = static_cast<float>(score[n] / total);
            }
        }
    }
    return table;
}

const ColorNamesTable& ColorNamesTable::builtin() {
    static const ColorNamesTable table = make_builtin_table();
    return table;
}

const float* ColorNamesTable::row_rgb(float r, float g, float b) const {
    auto quantize = [](float v) -> std::size_t {
        const int q = static_cast<int>(v * 32.0f);
        return static_cast<std::size_t>(std::clamp(q, 0, 31));
    };
    return row(quantize(r), quantize(g), quantize(b));
}

// On-disk layout: 32768 rows x 11 little-endian float32 values, no header.
void ColorNamesTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(data_.data()),
              static_cast<std::streamsize>(data_.size() * sizeof(float)));
    if (!out) throw std::runtime_error("short write: " + path);
}

ColorNamesTable ColorNamesTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open color-name table: " + path);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    const std::size_t expected = kRows * kNames * sizeof(float);
    if (bytes != expected)
        throw std::runtime_error("color-name table has wrong size: " + path);
    ColorNamesTable table;
    table.data_.resize(kRows * kNames);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(table.data_.data()),
            static_cast<std::streamsize>(expected));
    if (!in) throw std::runtime_error("short read: " + path);
    return table;
}

}  // namespace cpcf
