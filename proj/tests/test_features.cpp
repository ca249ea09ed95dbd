#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "cpcf/features.hpp"
#include "cpcf/signal.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cpcf;
using cpcf_test::make_rng;

namespace {

Image constant_image(std::size_t h, std::size_t w, float r, float g, float b) {
    Image img(h, w, 3);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            img.at(i, j, 0) = r;
            img.at(i, j, 1) = g;
            img.at(i, j, 2) = b;
        }
    return img;
}

Image random_rgb(std::mt19937_64& rng, std::size_t h, std::size_t w) {
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    Image img(h, w, 3);
    for (float& p : img.pixels) p = dist(rng);
    return img;
}

// 40x40 scene for the golden feature tensor: smooth color gradient plus
// three flat 12x12 rectangles whose center cells have zero gradient support,
// so every channel of those cells is hand-computable.
Image golden_image() {
    Image img(40, 40, 3);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = 0; j < 40; ++j) {
            img.at(i, j, 0) = static_cast<float>(i) / 39.0f;
            img.at(i, j, 1) = static_cast<float>(j) / 39.0f;
            img.at(i, j, 2) = static_cast<float>(i + j) / 78.0f;
        }
    auto paint = [&](std::size_t r0, std::size_t c0, float r, float g,
                     float b) {
        for (std::size_t i = r0; i < r0 + 12; ++i)
            for (std::size_t j = c0; j < c0 + 12; ++j) {
                img.at(i, j, 0) = r;
                img.at(i, j, 1) = g;
                img.at(i, j, 2) = b;
            }
    };
    paint(8, 8, 0.90f, 0.05f, 0.05f);   // center cell (3,3)
    paint(24, 4, 0.10f, 0.30f, 0.85f);  // center cell (7,2)
    paint(4, 24, 0.95f, 0.90f, 0.10f);  // center cell (2,7)
    return img;
}

void write_tensor(const std::filesystem::path& path, const FeatureMap& f) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(static_cast<bool>(out));
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(f.rows),
                                   static_cast<std::uint32_t>(f.cols),
                                   static_cast<std::uint32_t>(f.channels)};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    REQUIRE(static_cast<bool>(out));
}

FeatureMap read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(static_cast<bool>(in),
                    "missing golden file: ", path.string());
    std::uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    FeatureMap f(dims[0], dims[1], dims[2]);
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    REQUIRE(static_cast<bool>(in));
    return f;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("identity crop copies pixels exactly") {
    auto rng = make_rng(401);
    const Image img = random_rgb(rng, 4, 6);
    const Image out = extract_patch(img, 1.5, 2.5, 4.0, 6.0, 4, 6);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            for (std::size_t c = 0; c < 3; ++c)
                CHECK(out.at(i, j, c) == img.at(i, j, c));
}

TEST_CASE("crop past the border replicates edge pixels") {
    Image img(3, 3, 1);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            img.at(i, j) = static_cast<float>(i * 3 + j);
    // Center on the top-left pixel: one row/column hangs off each near edge.
    const Image out = extract_patch(img, 0.0, 0.0, 3.0, 3.0, 3, 3);
    const float expected[3][3] = {{0, 0, 1}, {0, 0, 1}, {3, 3, 4}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(out.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-6));
}

TEST_CASE("2x downscale of a ramp averages pixel pairs") {
    Image img(4, 4, 1);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            img.at(i, j) = static_cast<float>(j) / 3.0f;
    const Image out = extract_patch(img, 1.5, 1.5, 4.0, 4.0, 2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(out.at(i, 0) == doctest::Approx(0.5 / 3.0).epsilon(1e-6));
        CHECK(out.at(i, 1) == doctest::Approx(2.5 / 3.0).epsilon(1e-6));
    }
}

TEST_CASE("fractional center interpolates bilinearly") {
    Image img(1, 2, 1);
    img.at(0, 0) = 0.0f;
    img.at(0, 1) = 1.0f;
    const Image out = extract_patch(img, 0.0, 0.25, 1.0, 1.0, 1, 1);
    CHECK(out.at(0, 0) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("extract_patch rejects degenerate sizes") {
    const Image img(4, 4, 1);
    CHECK_THROWS_AS(extract_patch(img, 1.5, 1.5, 0.0, 4.0, 4, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(extract_patch(img, 1.5, 1.5, 4.0, 4.0, 0, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(extract_patch(Image(), 0, 0, 1, 1, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("constant patch produces all-zero hog channels") {
    const Image img = constant_image(16, 16, 0.3f, 0.7f, 0.2f);
    const FeatureMap f = hog_features(img, 4);
    CHECK(f.rows == 4);
    CHECK(f.cols == 4);
    CHECK(f.channels == 31);
    for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("step edge: hand-computed hog cell values") {
    // Vertical edge between columns 3 and 4; gradients point along +x, so
    // every vote lands in orientation bin 0.  Each cell accumulates
    // magnitude 3.5, cell energy 12.25, every 2x2 block sums to 49, and
    // 3.5/sqrt(49) = 0.5 saturates the 0.2 clip:
    //   signed bin 0 = unsigned bin 0 = 0.5 * 4 * 0.2 = 0.4
    //   every texture channel      = 0.2 / sqrt(18)
    Image img(8, 8, 1);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 4; j < 8; ++j) img.at(i, j) = 1.0f;
    const FeatureMap f = hog_features(img, 4);
    REQUIRE(f.rows == 2);
    REQUIRE(f.cols == 2);
    const double texture = 0.2 / std::sqrt(18.0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(f.at(0, i, j) == doctest::Approx(0.4).epsilon(1e-12));
            CHECK(f.at(18, i, j) == doctest::Approx(0.4).epsilon(1e-12));
            for (std::size_t o = 1; o < 18; ++o) CHECK(f.at(o, i, j) == 0.0);
            for (std::size_t o = 19; o < 27; ++o) CHECK(f.at(o, i, j) == 0.0);
            for (std::size_t n = 27; n < 31; ++n)
                CHECK(f.at(n, i, j) == doctest::Approx(texture).epsilon(1e-12));
        }
}

TEST_CASE("unsigned hog channels are invariant to 180-degree rotation") {
    auto rng = make_rng(402);
    const Image img = random_rgb(rng, 24, 24);
    Image rot(24, 24, 3);
    for (std::size_t i = 0; i < 24; ++i)
        for (std::size_t j = 0; j < 24; ++j)
            for (std::size_t c = 0; c < 3; ++c)
                rot.at(i, j, c) = img.at(23 - i, 23 - j, c);
    const FeatureMap a = hog_features(img, 4);
    const FeatureMap b = hog_features(rot, 4);
    for (std::size_t o = 18; o < 27; ++o)
        for (std::size_t i = 0; i < a.rows; ++i)
            for (std::size_t j = 0; j < a.cols; ++j)
                CHECK(std::abs(a.at(o, i, j) -
                               b.at(o, a.rows - 1 - i, a.cols - 1 - j)) <
                      1e-12);
}

TEST_CASE("non-multiple patch is padded up to full cells") {
    const Image img = constant_image(10, 13, 0.5f, 0.5f, 0.5f);
    const FeatureMap h = hog_features(img, 4);
    CHECK(h.rows == 3);
    CHECK(h.cols == 4);
    const FeatureMap c = cn_features(img, 4);
    CHECK(c.rows == 3);
    CHECK(c.cols == 4);
}

TEST_CASE("features shift with the image at cell granularity") {
    auto rng = make_rng(403);
    const Image img = random_rgb(rng, 40, 40);
    Image shifted(40, 40, 3);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = 0; j < 40; ++j)
            for (std::size_t c = 0; c < 3; ++c)
                shifted.at(i, j, c) = img.at(i >= 4 ? i - 4 : 0, j, c);
    const FeatureMap h1 = hog_features(img, 4);
    const FeatureMap h2 = hog_features(shifted, 4);
    // Rows whose normalization blocks touch the replicated band or either
    // image's bottom edge see different neighborhoods; interior rows match.
    for (std::size_t o = 0; o < 31; ++o)
        for (std::size_t i = 2; i <= 6; ++i)
            for (std::size_t j = 0; j < 10; ++j)
                CHECK(std::abs(h1.at(o, i, j) - h2.at(o, i + 1, j)) < 1e-6);
    const FeatureMap c1 = cn_features(img, 4);
    const FeatureMap c2 = cn_features(shifted, 4);
    for (std::size_t n = 0; n < 11; ++n)
        for (std::size_t i = 0; i <= 8; ++i)
            for (std::size_t j = 0; j < 10; ++j)
                CHECK(std::abs(c1.at(n, i, j) - c2.at(n, i + 1, j)) < 1e-12);
}

TEST_CASE("builtin color-name rows are probability vectors") {
    const ColorNamesTable& table = ColorNamesTable::builtin();
    auto rng = make_rng(404);
    std::uniform_int_distribution<std::size_t> bin(0, 31);
    for (int rep = 0; rep < 300; ++rep) {
        const float* row = table.row(bin(rng), bin(rng), bin(rng));
        double sum = 0.0;
        for (std::size_t n = 0; n < 11; ++n) {
            CHECK(row[n] >= 0.0f);
            sum += row[n];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("black patch maps mostly to the black name") {
    const Image img = constant_image(8, 8, 0.0f, 0.0f, 0.0f);
    const FeatureMap f = cn_features(img, 4);
    REQUIRE(f.channels == 11);
    const double black = f.at(0, 0, 0);
    CHECK(black > 0.5);
    for (std::size_t n = 1; n < 11; ++n) CHECK(black > f.at(n, 0, 0));
}

TEST_CASE("constant-color cell equals its table row") {
    const float r = 0.62f, g = 0.31f, b = 0.72f;
    const Image img = constant_image(4, 4, r, g, b);
    const FeatureMap f = cn_features(img, 4);
    REQUIRE(f.rows == 1);
    const float* row = ColorNamesTable::builtin().row_rgb(r, g, b);
    for (std::size_t n = 0; n < 11; ++n)
        CHECK(f.at(n, 0, 0) ==
              doctest::Approx(static_cast<double>(row[n])).epsilon(1e-12));
}

TEST_CASE("color names reject gray input") {
    const Image img(8, 8, 1);
    CHECK_THROWS_AS(cn_features(img, 4), std::invalid_argument);
}

TEST_CASE("color-name table save/load round-trip") {
    const auto path = std::filesystem::temp_directory_path() / "cpcf_cn.bin";
    const ColorNamesTable& table = ColorNamesTable::builtin();
    table.save(path.string());
    const ColorNamesTable loaded = ColorNamesTable::load(path.string());
    for (std::size_t r = 0; r < 32; r += 5)
        for (std::size_t g = 0; g < 32; g += 5)
            for (std::size_t b = 0; b < 32; b += 5) {
                const float* a = table.row(r, g, b);
                const float* l = loaded.row(r, g, b);
                for (std::size_t n = 0; n < 11; ++n) CHECK(a[n] == l[n]);
            }
    const auto bad = std::filesystem::temp_directory_path() / "cpcf_bad.bin";
    std::ofstream(bad.string(), std::ios::binary) << "short";
    CHECK_THROWS_AS(ColorNamesTable::load(bad.string()), std::runtime_error);
    std::filesystem::remove(path);
    std::filesystem::remove(bad);
}

TEST_CASE("mid-gray patch gives zero intensity features") {
    const Image img = constant_image(8, 8, 0.5f, 0.5f, 0.5f);
    const FeatureMap f = gray_features(img, 4);
    for (double v : f.values) CHECK(std::abs(v) < 1e-7);
}

TEST_CASE("sample stacks windowed channels: 43 for RGB, 32 for gray") {
    auto rng = make_rng(405);
    const Image rgb = random_rgb(rng, 40, 40);
    SampleGeometry geom;
    geom.center_row = 19.5;
    geom.center_col = 19.5;
    geom.patch_rows = 40.0;
    geom.patch_cols = 40.0;
    geom.model_rows = 40;
    geom.model_cols = 40;
    FeatureConfig cfg;
    const FeatureMap f = build_sample(rgb, geom, cfg);
    CHECK(f.rows == 10);
    CHECK(f.cols == 10);
    CHECK(f.channels == 43);
    // Hann window zeroes the border cells of every channel.
    for (std::size_t c = 0; c < f.channels; ++c)
        for (std::size_t i = 0; i < f.rows; ++i)
            for (std::size_t j = 0; j < f.cols; ++j)
                if (i == 0 || j == 0 || i + 1 == f.rows || j + 1 == f.cols)
                    CHECK(f.at(c, i, j) == 0.0);

    const Image gray = to_gray(rgb);
    const FeatureMap fg = build_sample(gray, geom, cfg);
    CHECK(fg.channels == 32);

    SampleGeometry bad = geom;
    bad.model_cols = 42;
    CHECK_THROWS_AS(build_sample(rgb, bad, cfg), std::invalid_argument);
}

TEST_CASE("feature sample matches committed golden tensor") {
    const Image img = golden_image();
    SampleGeometry geom;
    geom.center_row = 19.5;
    geom.center_col = 19.5;
    geom.patch_rows = 40.0;
    geom.patch_cols = 40.0;
    geom.model_rows = 40;
    geom.model_cols = 40;
    const FeatureMap f = build_sample(img, geom, FeatureConfig{});
    REQUIRE(f.rows == 10);
    REQUIRE(f.cols == 10);
    REQUIRE(f.channels == 43);

    // Channel-wise hand check on the three flat-color cells: no gradient
    // support, so hog is zero; color names and intensity reduce to the
    // table row / channel mean scaled by the Hann window.
    const Grid2D window = hann_window(10, 10);
    const ColorNamesTable& table = ColorNamesTable::builtin();
    struct FlatCell {
        std::size_t i, j;
        float r, g, b;
    };
    const FlatCell cells[3] = {{3, 3, 0.90f, 0.05f, 0.05f},
                               {7, 2, 0.10f, 0.30f, 0.85f},
                               {2, 7, 0.95f, 0.90f, 0.10f}};
    for (const FlatCell& cell : cells) {
        const double w = window(cell.i, cell.j);
        for (std::size_t o = 0; o < 31; ++o)
            CHECK(f.at(o, cell.i, cell.j) == 0.0);
        const float* row = table.row_rgb(cell.r, cell.g, cell.b);
        for (std::size_t n = 0; n < 11; ++n)
            CHECK(f.at(31 + n, cell.i, cell.j) ==
                  doctest::Approx(static_cast<double>(row[n]) * w)
                      .epsilon(1e-12));
        const double mean =
            static_cast<double>((cell.r + cell.g + cell.b) / 3.0f);
        CHECK(f.at(42, cell.i, cell.j) ==
              doctest::Approx((mean - 0.5) * w).epsilon(1e-6));
    }

    const std::filesystem::path golden =
        std::filesystem::path(CPCF_TEST_DATA_DIR) / "sample_features_40x40.bin";
    if (std::getenv("CPCF_REGEN_GOLDEN") != nullptr) {
        write_tensor(golden, f);
        MESSAGE("regenerated ", golden.string());
        return;
    }
    const FeatureMap stored = read_tensor(golden);
    REQUIRE(stored.rows == f.rows);
    REQUIRE(stored.cols == f.cols);
    REQUIRE(stored.channels == f.channels);
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < f.values.size(); ++k)
        if (stored.values[k] != f.values[k]) ++mismatches;
    CHECK(mismatches == 0);
}

}  // TEST_SUITE
