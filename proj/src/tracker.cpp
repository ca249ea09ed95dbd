#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpcf/signal.hpp"
#include "cpcf/tracker.hpp"

namespace cpcf {
namespace {

void validate_config(const TrackerConfig& cfg) {
    if (!(cfg.gamma >= 0.0)) throw std::invalid_argument("tracker: gamma < 0");
    if (!(cfg.h_min > 0.0) || !(cfg.h_min <= cfg.h_max))
        throw std::invalid_argument("tracker: need 0 < h_min <= h_max");
    if (!(cfg.alpha > 0.0) || !(cfg.beta >= 0.0))
        throw std::invalid_argument("tracker: bad alpha/beta");
    if (!(cfg.eta >= 0.0 && cfg.eta <= 1.0))
        throw std::invalid_argument("tracker: eta outside [0, 1]");
    if (cfg.cell_size == 0) throw std::invalid_argument("tracker: cell size 0");
    if (!(cfg.padding_area >= 1.0))
        throw std::invalid_argument("tracker: padding area < 1");
    if (cfg.scale_count == 0 || cfg.scale_count % 2 == 0)
        throw std::invalid_argument("tracker: scale count must be odd");
    if (!(cfg.scale_step > 1.0))
        throw std::invalid_argument("tracker: scale step must exceed 1");
    if (cfg.admm_iters == 0)
        throw std::invalid_argument("tracker: zero solver iterations");
}

// Even cell count so the grid center (rows/2, cols/2) is a true cell; at
// least 4 cells per axis to leave room for the sidelobe window.
std::size_t even_cells(double pixels, std::size_t cell) {
    const double cells = pixels / static_cast<double>(cell) / 2.0;
    const long half = std::max(2L, std::lround(cells));
    return static_cast<std::size_t>(2 * half);
}

// Vertex offset of the parabola through (-1,a), (0,b), (1,c), clamped to
// half a cell; flat or non-concave triples keep the integer peak.
double parabolic_offset(double a, double b, double c) {
    const double denom = a - 2.0 * b + c;
    if (!(denom < -1e-12)) return 0.0;
    return std::clamp((a - c) / (2.0 * denom), -0.5, 0.5);
}

}  // namespace

Tracker::Tracker(const Image& frame, const BoundingBox& box,
                 const TrackerConfig& cfg)
    : cfg_(cfg) {
    validate_config(cfg_);
    if (frame.empty()) throw std::invalid_argument("tracker: empty frame");
    if (!(box.w >= 2.0) || !(box.h >= 2.0) || !std::isfinite(box.x) ||
        !std::isfinite(box.y))
        throw std::invalid_argument("tracker: degenerate bounding box");
    pos_row_ = box.y + box.h / 2.0;
    pos_col_ = box.x + box.w / 2.0;
    if (pos_row_ < 0.0 || pos_col_ < 0.0 ||
        pos_row_ > static_cast<double>(frame.height - 1) ||
        pos_col_ > static_cast<double>(frame.width - 1))
        throw std::invalid_argument("tracker: box center outside frame");
    target_h_ = box.h;
    target_w_ = box.w;

    const double pad = std::sqrt(cfg_.padding_area);
    const double search_h = target_h_ * pad;
    const double search_w = target_w_ * pad;
    const double shrink = std::min(
        1.0, std::sqrt(static_cast<double>(cfg_.max_model_area) /
                       (search_h * search_w)));
    cells_r_ = even_cells(search_h * shrink, cfg_.cell_size);
    cells_c_ = even_cells(search_w * shrink, cfg_.cell_size);

    // The target covers 1/pad of the search window per axis.
    const double target_cells_r = static_cast<double>(cells_r_) / pad;
    const double target_cells_c = static_cast<double>(cells_c_) / pad;
    const double sigma =
        cfg_.label_sigma_factor * std::sqrt(target_cells_r * target_cells_c);
    label_ = gaussian_label(cells_r_, cells_c_, sigma, cells_r_ / 2,
                            cells_c_ / 2);
    y_hat_ = dft2(label_);
    l_fixed_ = fixed_label(label_);
    l_fixed_hat_ = dft2(l_fixed_);
    weight_ = spatial_weight(target_cells_r, target_cells_c, cells_r_,
                             cells_c_, cfg_.spatial_mu, cfg_.spatial_theta);

    model_hat_ = sample_spectra(frame);
    stack_ = make_filter_stack(model_hat_.size(), cells_r_, cells_c_,
                               cfg_.admm.nu0);
    train_filter(nullptr);
    frame_index_ = 1;
}

SampleGeometry Tracker::geometry_at(double scale_factor) const {
    const double pad = std::sqrt(cfg_.padding_area);
    SampleGeometry geom;
    geom.center_row = pos_row_;
    geom.center_col = pos_col_;
    geom.patch_rows = target_h_ * pad * scale_factor;
    geom.patch_cols = target_w_ * pad * scale_factor;
    geom.model_rows = cells_r_ * cfg_.cell_size;
    geom.model_cols = cells_c_ * cfg_.cell_size;
    return geom;
}

std::vector<Spectrum2D> Tracker::sample_spectra(const Image& frame) const {
    FeatureConfig fcfg;
    fcfg.cell_size = cfg_.cell_size;
    fcfg.cn_table = cfg_.cn_table;
    const FeatureMap sample = build_sample(frame, geometry_at(1.0), fcfg);
    if (!model_hat_.empty() && sample.channels != model_hat_.size())
        throw std::invalid_argument("tracker: frame channel count changed");
    std::vector<Spectrum2D> out;
    out.reserve(sample.channels);
    for (std::size_t c = 0; c < sample.channels; ++c)
        out.push_back(dft2(sample.channel(c)));
    return out;
}

// Detection mirrors the training response: R = sum_d z_d (*) w_d, evaluated
// as a plain spectral product, so content shifted by delta moves the peak
// from the label center by exactly delta.
ResponseMap Tracker::response_for(const std::vector<Spectrum2D>& z_hat) const {
    Spectrum2D acc(cells_r_, cells_c_);
    for (std::size_t d = 0; d < z_hat.size(); ++d) {
        const Spectrum2D& z = z_hat[d];
        const Spectrum2D& w = filter_hat_[d];
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += z[k] * w[k];
    }
    return ResponseMap(idft2(acc));
}

ResponseMap Tracker::respond(const Image& frame) const {
    return response_for(sample_spectra(frame));
}

DetectResult Tracker::detect(const Image& frame) const {
    if (frame_index_ == 0) throw std::logic_error("tracker: not initialized");
    FeatureConfig fcfg;
    fcfg.cell_size = cfg_.cell_size;
    fcfg.cn_table = cfg_.cn_table;

    const int half = static_cast<int>(cfg_.scale_count) / 2;
    DetectResult best;
    double best_score = -1e300;
    double best_patch_rows = 0.0, best_patch_cols = 0.0;
    for (int s = -half; s <= half; ++s) {
        const double factor = std::pow(cfg_.scale_step, s);
        const SampleGeometry geom = geometry_at(factor);
        const FeatureMap sample = build_sample(frame, geom, fcfg);
        if (sample.channels != model_hat_.size())
            throw std::invalid_argument("tracker: frame channel count changed");
        std::vector<Spectrum2D> z_hat;
        z_hat.reserve(sample.channels);
        for (std::size_t c = 0; c < sample.channels; ++c)
            z_hat.push_back(dft2(sample.channel(c)));
        ResponseMap resp = response_for(z_hat);
        const double score =
            resp.peak_value * std::pow(cfg_.scale_penalty, std::abs(s));
        if (score > best_score) {
            best_score = score;
            best.response = std::move(resp);
            best.scale_offset = s;
            best_patch_rows = geom.patch_rows;
            best_patch_cols = geom.patch_cols;
        }
    }

    const Grid2D& r = best.response.grid;
    const std::size_t pi = best.response.peak_pos.row;
    const std::size_t pj = best.response.peak_pos.col;
    const std::size_t up = (pi + cells_r_ - 1) % cells_r_;
    const std::size_t down = (pi + 1) % cells_r_;
    const std::size_t left = (pj + cells_c_ - 1) % cells_c_;
    const std::size_t right = (pj + 1) % cells_c_;
    best.peak_row = static_cast<double>(pi) +
                    parabolic_offset(r(up, pj), r(pi, pj), r(down, pj));
    best.peak_col = static_cast<double>(pj) +
                    parabolic_offset(r(pi, left), r(pi, pj), r(pi, right));

    // Content shifted by delta yields R(tau) = T(tau - delta), so the peak
    // sits at center + delta; translate by (peak - center), converted from
    // cells to frame pixels at the winning scale.
    const double px_per_cell_r =
        best_patch_rows / static_cast<double>(cells_r_);
    const double px_per_cell_c =
        best_patch_cols / static_cast<double>(cells_c_);
    best.d_row = (best.peak_row - static_cast<double>(cells_r_ / 2)) *
                 px_per_cell_r;
    best.d_col = (best.peak_col - static_cast<double>(cells_c_ / 2)) *
                 px_per_cell_c;
    return best;
}

void Tracker::update_model(const std::vector<Spectrum2D>& sample_hat,
                           double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("tracker: eta outside [0, 1]");
    if (sample_hat.size() != model_hat_.size())
        throw std::invalid_argument("tracker: sample channel mismatch");
    for (std::size_t d = 0; d < model_hat_.size(); ++d) {
        Spectrum2D& m = model_hat_[d];
        const Spectrum2D& s = sample_hat[d];
        for (std::size_t k = 0; k < m.size(); ++k)
            m[k] = (1.0 - eta) * m[k] + eta * s[k];
    }
}

void Tracker::refresh_filter_spectra() {
    filter_hat_.clear();
    filter_hat_.reserve(stack_.w.size());
    for (const Grid2D& w : stack_.w) filter_hat_.push_back(dft2(w));
}

void Tracker::train_filter(const ResponseMap* detection) {
    TrainingProblem problem;
    problem.x_hat = model_hat_;
    problem.y_hat = y_hat_;
    problem.gamma = cfg_.gamma;
    problem.spatial_weight = weight_;
    if (detection != nullptr) {
        const PsrmScore score =
            psrm(*detection, cfg_.beta, cfg_.sidelobe_margin);
        last_psrm_ = score.value;
        last_peak_ = detection->peak_value;
        last_h_ = dynamic_factor(score, cfg_.h_min, cfg_.h_max, cfg_.alpha);
        h_log_.push_back(last_h_);
    }
    const Grid2D reference =
        detection != nullptr
            ? consistency_reference(*detection, cfg_.sidelobe_margin)
            : Grid2D();
    if (!reference.empty()) {
        problem.r_hat = dft2(reference);
        Spectrum2D l_hat = l_fixed_hat_;
        for (auto& v : l_hat) v *= last_h_;
        problem.l_hat = std::move(l_hat);
    } else {
        // No usable prior response (first frame, or a degenerate flat
        // detection): train without the consistency term.
        problem.gamma = 0.0;
    }

    FilterStack init = stack_;
    init.nu = cfg_.admm.nu0;
    for (Spectrum2D& z : init.zeta_hat)
        std::fill(z.begin(), z.end(), std::complex<double>(0.0));
    stack_ = solve_filter(problem, std::move(init), cfg_.admm_iters, cfg_.admm);
    refresh_filter_spectra();
}

void Tracker::train(const ResponseMap& detection) {
    if (frame_index_ == 0) throw std::logic_error("tracker: not initialized");
    train_filter(&detection);
}

BoundingBox Tracker::step(const Image& frame) {
    const DetectResult det = detect(frame);

    pos_row_ = std::clamp(pos_row_ + det.d_row, 0.0,
                          static_cast<double>(frame.height - 1));
    pos_col_ = std::clamp(pos_col_ + det.d_col, 0.0,
                          static_cast<double>(frame.width - 1));
    if (det.scale_offset != 0) {
        const double factor = std::pow(cfg_.scale_step, det.scale_offset);
        target_h_ = std::max(2.0, target_h_ * factor);
        target_w_ = std::max(2.0, target_w_ * factor);
    }

    update_model(sample_spectra(frame), cfg_.eta);

    last_train_diverged_ = false;
    const FilterStack saved = stack_;
    const std::vector<Spectrum2D> saved_hat = filter_hat_;
    try {
        train_filter(&det.response);
    } catch (const SolverDivergence&) {
        // Keep the last finite filter; the model update above stands.
        stack_ = saved;
        filter_hat_ = saved_hat;
        last_train_diverged_ = true;
    }

    ++frame_index_;
    return bounding_box();
}

BoundingBox Tracker::bounding_box() const {
    return {pos_col_ - target_w_ / 2.0, pos_row_ - target_h_ / 2.0, target_w_,
            target_h_};
}

}  // namespace cpcf
