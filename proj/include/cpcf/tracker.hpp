#pragma once

#include <cstddef>
#include <vector>

#include "cpcf/consistency.hpp"
#include "cpcf/features.hpp"
#include "cpcf/grid.hpp"
#include "cpcf/image.hpp"
#include "cpcf/solver.hpp"

namespace cpcf {

// Axis-aligned box in pixel coordinates, top-left corner plus size.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
};

struct TrackerConfig {
    // Training objective.
    double gamma = 0.9;
    double h_min = 0.6;
    double h_max = 1.2;
    double alpha = 50.0;
    double beta = 100.0;
    double eta = 0.042;

    // Feature geometry.
    std::size_t cell_size = 4;
    double padding_area = 4.0;  // search area as a multiple of target area
    std::size_t max_model_area = 200 * 200;
    double label_sigma_factor = 1.0 / 16.0;

    // Scale search: odd number of candidate scales around the current one.
    std::size_t scale_count = 5;
    double scale_step = 1.01;
    double scale_penalty = 0.99;  // per step away from the current scale

    // Optimizer.
    std::size_t admm_iters = 4;
    AdmmParams admm;

    // Response quality.
    double sidelobe_margin = 0.15;

    // Spatial penalty shape.
    double spatial_mu = 0.1;
    double spatial_theta = 3.0;

    const ColorNamesTable* cn_table = nullptr;  // nullptr -> builtin
};

// Outcome of the multi-scale detection pass on one frame.
struct DetectResult {
    ResponseMap response;      // response grid at the winning scale
    double peak_row = 0.0;     // sub-cell refined peak, cell units
    double peak_col = 0.0;
    int scale_offset = 0;      // steps from the current scale
    double d_row = 0.0;        // implied translation, frame pixels
    double d_col = 0.0;
};

// Correlation-filter tracker with a dynamic response-consistency constraint.
// Owns one target; not safe for concurrent mutation, but independent
// instances never share state.
class Tracker {
public:
    Tracker(const Image& frame, const BoundingBox& box,
            const TrackerConfig& cfg = {});

    // Full per-frame update: detect, move, refresh the appearance model,
    // retrain the filter.  If training diverges the previous filter is kept
    // and the box is still emitted.
    BoundingBox step(const Image& frame);

    // Multi-scale detection against the current filter; does not mutate
    // tracker state.
    DetectResult detect(const Image& frame) const;

    // Response at the current position and scale only.
    ResponseMap respond(const Image& frame) const;

    // Feature spectra of the identity-scale sample at the current position.
    std::vector<Spectrum2D> sample_spectra(const Image& frame) const;

    // model <- (1 - eta) * model + eta * sample, per channel and bin.
    void update_model(const std::vector<Spectrum2D>& sample_hat, double eta);

    // Retrains the filter from the given detection response: scores it,
    // derives the dynamic label, and runs the configured ADMM rounds.
    void train(const ResponseMap& detection);

    BoundingBox bounding_box() const;
    const TrackerConfig& config() const { return cfg_; }
    std::size_t frame_index() const { return frame_index_; }
    std::size_t grid_rows() const { return cells_r_; }
    std::size_t grid_cols() const { return cells_c_; }
    double position_row() const { return pos_row_; }
    double position_col() const { return pos_col_; }
    double last_h() const { return last_h_; }
    double last_psrm() const { return last_psrm_; }
    double last_peak() const { return last_peak_; }
    const std::vector<double>& h_log() const { return h_log_; }
    bool last_train_diverged() const { return last_train_diverged_; }
    const std::vector<Grid2D>& filter() const { return stack_.w; }
    const std::vector<Spectrum2D>& model() const { return model_hat_; }
    const Grid2D& label() const { return label_; }
    const SpatialWeight& penalty() const { return weight_; }

private:
    SampleGeometry geometry_at(double scale_factor) const;
    ResponseMap response_for(const std::vector<Spectrum2D>& z_hat) const;
    void train_filter(const ResponseMap* detection);
    void refresh_filter_spectra();

    TrackerConfig cfg_;
    std::size_t cells_r_ = 0;
    std::size_t cells_c_ = 0;
    double pos_row_ = 0.0;
    double pos_col_ = 0.0;
    double target_h_ = 0.0;
    double target_w_ = 0.0;

    Grid2D label_;
    Spectrum2D y_hat_;
    Grid2D l_fixed_;
    Spectrum2D l_fixed_hat_;
    SpatialWeight weight_;

    std::vector<Spectrum2D> model_hat_;
    FilterStack stack_;
    std::vector<Spectrum2D> filter_hat_;

    std::size_t frame_index_ = 0;
    double last_h_ = 1.0;
    double last_psrm_ = 0.0;
    double last_peak_ = 0.0;
    std::vector<double> h_log_;
    bool last_train_diverged_ = false;
};

}  // namespace cpcf
