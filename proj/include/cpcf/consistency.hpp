#pragma once

#include <cstddef>

#include "cpcf/grid.hpp"

namespace cpcf {

struct PeakPos {
    std::size_t row = 0;
    std::size_t col = 0;
};

// A response grid with its peak cached; ties are broken by the first maximum
// in row-major order so re-centering is deterministic.
struct ResponseMap {
    Grid2D grid;
    double peak_value = 0.0;
    PeakPos peak_pos;

    ResponseMap() = default;
    explicit ResponseMap(Grid2D g);
};

struct ConsistencyMap {
    Grid2D grid;
};

// A fixed label scaled by the regulatory factor h.
struct ConstraintLabel {
    Grid2D grid;
    double h = 1.0;
};

// Response-quality score: peak-to-sidelobe ratio plus a weighted peak
// magnitude, value = psr_part + beta * peak_part.
struct PsrmScore {
    double value = 0.0;
    double psr_part = 0.0;
    double peak_part = 0.0;
};

// Shift that moves the response peak to cell (0, 0). The same re-centered
// grid serves as the correlation reference inside the solver, so the
// convention lives here once.
Grid2D recenter_to_origin(const ResponseMap& resp);

// Half-extent (cells) of the peak window that separates the main lobe from
// the sidelobe: max(1, round(margin * dim / 2)) per axis. Shared by the
// quality score and the consistency reference so "peak region" means the
// same thing everywhere.
std::size_t peak_window_half(std::size_t dim, double margin);

// Detection response conditioned into the fixed label's shape family before
// it enters the consistency term of filter training: main lobe only
// (sidelobe region zeroed), baseline subtracted, peak scaled to one and
// moved to the origin.  A clean unit-peak response passes through almost
// unchanged, so the ideal filter stays a fixed point of the regularized
// objective; coupling the raw response instead lets its pedestal, sidelobes
// and low-frequency tails fight the data term until the filter diverges.
// Returns an empty grid for a degenerate (flat) response.
Grid2D consistency_reference(const ResponseMap& detection, double margin);

// Consistency between the target response and the re-centered detection
// response: C = cyclic_correlate(recenter_to_origin(detect), target). When
// both responses equal the centered ideal label y, C equals fixed_label(y)
// exactly, and C is invariant to circular shifts of the detection response.
ConsistencyMap consistency_map(const ResponseMap& target_resp,
                               const ResponseMap& detect_resp);

// Autocorrelation of the ideal response, circularly shifted so its peak sits
// at (floor(M/2), floor(N/2)). Callers cache the result per filter geometry.
Grid2D fixed_label(const Grid2D& y);

// Quality of a response map. The sidelobe is every cell outside a clamped
// square exclusion window centered on the peak with half-width
// max(1, round(margin * dim / 2)) per axis. A flat sidelobe (population
// std dev < 1e-8) zeroes the ratio part.
PsrmScore psrm(const ResponseMap& resp, double beta, double sidelobe_margin);

// Linear map from the quality score into [h_min, h_max]:
// h = h_min + (score/alpha) * (h_max - h_min), clamped.
double dynamic_factor(const PsrmScore& score, double h_min, double h_max,
                      double alpha);

// Scales the fixed label by h.
ConstraintLabel dynamic_label(double h, const Grid2D& l_f);

}  // namespace cpcf
