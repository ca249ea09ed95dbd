#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "cpcf/harness.hpp"
#include "cpcf/image_io.hpp"

namespace fs = std::filesystem;

namespace cpcf {
namespace {

struct Rgb {
    float r, g, b;
};

// Standard normal via Box-Muller on raw engine output, so noise is
// bit-reproducible across standard libraries.
class NormalSource {
public:
    explicit NormalSource(unsigned seed) : rng_(seed) {}
    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 1e-300);
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return m * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform() {
        return (static_cast<double>(rng_()) + 0.5) /
               (static_cast<double>(std::mt19937_64::max()) + 1.0);
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Texture of the target in normalized local coordinates (u, v) in [0, 1).
// `swapped` flips the palette to model an abrupt appearance change.
class TargetPattern {
public:
    TargetPattern(const std::string& kind, unsigned seed) : kind_(kind) {
        if (kind_ != "checker" && kind_ != "rings" && kind_ != "noise")
            throw std::invalid_argument("synth: unknown pattern " + kind);
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        texels_.reserve(16 * 16);
        for (int k = 0; k < 16 * 16; ++k) {
            const auto bits = rng();
            texels_.push_back(Rgb{
                static_cast<float>((bits & 0x3FF) / 1023.0),
                static_cast<float>(((bits >> 10) & 0x3FF) / 1023.0),
                static_cast<float>(((bits >> 20) & 0x3FF) / 1023.0)});
        }
    }

    Rgb at(double u, double v, bool swapped) const {
        const int iu = std::min(15, static_cast<int>(u * 16.0));
        const int iv = std::min(15, static_cast<int>(v * 16.0));
        Rgb t = texels_[static_cast<std::size_t>(iv * 16 + iu)];
        if (kind_ == "noise") {
            if (swapped) std::swap(t.r, t.b);
            return t;
        }
        const Rgb a = swapped ? Rgb{0.10f, 0.75f, 0.90f} : Rgb{0.95f, 0.25f, 0.15f};
        const Rgb b = swapped ? Rgb{0.90f, 0.85f, 0.10f} : Rgb{0.10f, 0.20f, 0.80f};
        Rgb base;
        if (kind_ == "checker") {
            const int cu = std::min(5, static_cast<int>(u * 6.0));
            const int cv = std::min(5, static_cast<int>(v * 6.0));
            base = ((cu + cv) % 2 == 0) ? a : b;
        } else {  // rings
            const double d = std::hypot(u - 0.5, v - 0.5);
            base = (static_cast<int>(d * 16.0) % 2 == 0) ? a : b;
        }
        // Texel shading on top of the base colors: flat patches carry
        // almost no gradient-feature energy, which a correlation filter
        // cannot anchor to.  Two octaves, the coarse one dominant so the
        // structure survives cell-level feature pooling; the modulation
        // keeps the hue (for color-name features) intact.
        const int cu8 = std::min(7, static_cast<int>(u * 8.0));
        const int cv8 = std::min(7, static_cast<int>(v * 8.0));
        const Rgb c = texels_[static_cast<std::size_t>(cv8 * 8 + cu8)];
        const float fr = (0.50f + 0.38f * c.r) + 0.12f * t.r;
        const float fg = (0.50f + 0.38f * c.g) + 0.12f * t.g;
        const float fb = (0.50f + 0.38f * c.b) + 0.12f * t.b;
        return Rgb{base.r * fr, base.g * fg, base.b * fb};
    }

private:
    std::string kind_;
    std::vector<Rgb> texels_;
};

Rgb background(std::size_t i, std::size_t j) {
    const float wave =
        0.06f * std::sin(static_cast<float>(i) / 13.0f) *
        std::cos(static_cast<float>(j) / 11.0f);
    const float block = ((i / 24 + j / 24) % 2 == 0) ? 0.03f : -0.03f;
    return Rgb{0.42f + wave + block, 0.40f + wave - block, 0.38f - wave};
}

}  // namespace

SynthSequence make_synth(const SynthSpec& spec) {
    if (spec.frames == 0) throw std::invalid_argument("synth: zero frames");
    if (spec.frame_w < 8 || spec.frame_h < 8)
        throw std::invalid_argument("synth: frame too small");
    if (spec.target_w < 4.0 || spec.target_h < 4.0)
        throw std::invalid_argument("synth: target too small");
    if (!(spec.scale_ramp > 0.0))
        throw std::invalid_argument("synth: non-positive scale ramp");

    const TargetPattern pattern(spec.pattern, spec.seed);
    NormalSource noise(spec.seed * 2654435761u + 17u);

    // Precompute boxes and validate the whole trajectory up front.
    std::vector<BoundingBox> boxes;
    boxes.reserve(spec.frames);
    const double cx0 = spec.start_x + spec.target_w / 2.0;
    const double cy0 = spec.start_y + spec.target_h / 2.0;
    for (std::size_t k = 0; k < spec.frames; ++k) {
        const double s = std::pow(spec.scale_ramp, static_cast<double>(k));
        const double w = spec.target_w * s;
        const double h = spec.target_h * s;
        const double cx = cx0 + spec.motion_x * static_cast<double>(k);
        const double cy = cy0 + spec.motion_y * static_cast<double>(k);
        const BoundingBox box{cx - w / 2.0, cy - h / 2.0, w, h};
        if (box.x < 0.0 || box.y < 0.0 ||
            box.x + box.w > static_cast<double>(spec.frame_w) ||
            box.y + box.h > static_cast<double>(spec.frame_h))
            throw std::invalid_argument(
                "synth: target leaves the frame at frame " +
                std::to_string(k + 1));
        boxes.push_back(box);
    }

    SynthSequence out;
    out.ground_truth = boxes;
    out.frames.reserve(spec.frames);
    const std::size_t channels = spec.color ? 3u : 1u;
    for (std::size_t k = 0; k < spec.frames; ++k) {
        const BoundingBox& box = boxes[k];
        const bool swapped = spec.appearance_swap_frame > 0 &&
                             k + 1 >= spec.appearance_swap_frame;
        Image frame(spec.frame_h, spec.frame_w, channels);
        for (std::size_t i = 0; i < spec.frame_h; ++i) {
            for (std::size_t j = 0; j < spec.frame_w; ++j) {
                const Rgb bg = background(i, j);
                // Pixel/target overlap gives edge antialiasing.
                const double px0 = static_cast<double>(j);
                const double py0 = static_cast<double>(i);
                const double cov_x = std::clamp(
                    std::min(box.x + box.w, px0 + 1.0) - std::max(box.x, px0),
                    0.0, 1.0);
                const double cov_y = std::clamp(
                    std::min(box.y + box.h, py0 + 1.0) - std::max(box.y, py0),
                    0.0, 1.0);
                const double alpha = cov_x * cov_y;
                Rgb color = bg;
                if (alpha > 0.0) {
                    const double u =
                        std::clamp((px0 + 0.5 - box.x) / box.w, 0.0,
                                   std::nextafter(1.0, 0.0));
                    const double v =
                        std::clamp((py0 + 0.5 - box.y) / box.h, 0.0,
                                   std::nextafter(1.0, 0.0));
                    const Rgb fg = pattern.at(u, v, swapped);
                    const float af = static_cast<float>(alpha);
                    color = Rgb{af * fg.r + (1.0f - af) * bg.r,
                                af * fg.g + (1.0f - af) * bg.g,
                                af * fg.b + (1.0f - af) * bg.b};
                }
                if (channels == 3) {
                    frame.at(i, j, 0) = color.r;
                    frame.at(i, j, 1) = color.g;
                    frame.at(i, j, 2) = color.b;
                } else {
                    frame.at(i, j, 0) = (color.r + color.g + color.b) / 3.0f;
                }
            }
        }
        if (spec.noise_sigma > 0.0) {
            for (float& p : frame.pixels) {
                const double noisy =
                    static_cast<double>(p) + spec.noise_sigma * noise.next();
                p = static_cast<float>(std::clamp(noisy, 0.0, 1.0));
            }
        }
        out.frames.push_back(std::move(frame));
    }
    return out;
}

void write_synth(const SynthSpec& spec, const std::string& out_dir) {
    const SynthSequence seq = make_synth(spec);
    const fs::path dir(out_dir);
    fs::create_directories(dir / "img");

    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "%04zu.png", k + 1);
        save_png((dir / "img" / name).string(), seq.frames[k]);
    }

    std::ofstream gt(dir / "groundtruth_rect.txt");
    if (!gt) throw std::runtime_error("cannot write ground truth: " + out_dir);
    char line[128];
    for (const BoundingBox& b : seq.ground_truth) {
        // Stored 1-based, matching the loader's convention.
        std::snprintf(line, sizeof line, "%.4f,%.4f,%.4f,%.4f\n", b.x + 1.0,
                      b.y + 1.0, b.w, b.h);
        gt << line;
    }
}

}  // namespace cpcf
