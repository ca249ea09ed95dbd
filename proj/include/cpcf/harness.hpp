#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cpcf/image.hpp"
#include "cpcf/tracker.hpp"

namespace cpcf {

// An on-disk image sequence: frames plus one annotation per frame.  An
// absent annotation (NaN line, occlusion marker) keeps its frame in the run
// but drops it from the metrics.
struct Sequence {
    std::string name;
    std::vector<std::string> frame_paths;
    std::vector<std::optional<BoundingBox>> ground_truth;
    std::string attributes;
};

// Frame files under `<dir>/img/` (png/jpg), sorted by the numeric run in the
// filename. Throws when the directory is missing or holds no frames.
std::vector<std::string> list_frames(const std::string& dir_path);

// Reads `<dir>/img/*.png|jpg` (sorted numerically) and
// `<dir>/groundtruth_rect.txt` with one `x,y,w,h` line per frame (comma,
// tab, or space separated; 1-based coordinates converted to 0-based).
// Optional `attributes.txt` tags are passed through to the summary.
Sequence load_sequence(const std::string& dir_path);

// Euclidean distance between box centers, pixels.
double center_error(const BoundingBox& a, const BoundingBox& b);

// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

struct MetricsReport {
    std::string name;
    std::string attributes;
    // Aligned with frames; NaN where the frame has no annotation.
    std::vector<double> cle_per_frame;
    std::vector<double> iou_per_frame;
    // precision_curve[t] = fraction of annotated frames with CLE <= t px.
    std::array<double, 51> precision_curve{};
    // success_curve[k] = fraction with IoU >= k/100 and any overlap at all.
    std::array<double, 101> success_curve{};
    double precision20 = 0.0;
    double auc = 0.0;       // mean of success_curve
    double mean_cle = 0.0;  // over annotated frames
    double fps = 0.0;       // tracked frames per second, decode excluded
};

// Minimal per-frame tracking interface so the metric pipeline can be
// exercised with stub trackers as well as the real one.
class TrackerDriver {
public:
    virtual ~TrackerDriver() = default;
    virtual void init(const Image& frame, const BoundingBox& box) = 0;
    virtual BoundingBox track(const Image& frame) = 0;
};

// One-pass evaluation core over in-memory frames: initialize on the first
// annotation, track every later frame without re-initialization, time only
// the track calls.
MetricsReport run_ope_frames(const std::string& name,
                             const std::vector<Image>& frames,
                             const std::vector<std::optional<BoundingBox>>& gt,
                             TrackerDriver& driver);

// Loads the sequence's frames and evaluates the correlation-filter tracker.
MetricsReport run_ope(const Sequence& seq, const TrackerConfig& cfg);

// Unweighted mean over sequences (curves, precision, auc, fps).
MetricsReport aggregate_report(const std::vector<MetricsReport>& reports);

// Writes `<out_dir>/<name>.curves.csv` per report plus `summary.csv` (name,
// precision@20, auc — deterministic across reruns) and `timings.csv` (fps).
void emit_report(const std::vector<MetricsReport>& reports,
                 const std::string& out_dir);

// Synthetic sequence description; everything is deterministic in the seed.
struct SynthSpec {
    std::string pattern = "checker";  // checker | rings | noise
    std::size_t frame_w = 240;
    std::size_t frame_h = 240;
    double target_w = 40.0;
    double target_h = 40.0;
    double start_x = 30.0;  // top-left of the first box
    double start_y = 30.0;
    double motion_x = 2.0;  // pixels per frame
    double motion_y = 0.0;
    std::size_t frames = 100;
    double scale_ramp = 1.0;  // per-frame size multiplier
    double noise_sigma = 0.0;
    std::size_t appearance_swap_frame = 0;  // 1-based; 0 = never
    unsigned seed = 1;
    bool color = true;
};

struct SynthSequence {
    std::vector<Image> frames;
    std::vector<BoundingBox> ground_truth;
};

// Textured rectangle on a textured background with edge-antialiased
// compositing, optional Gaussian pixel noise, exact ground truth.  Throws if
// the target would leave the frame.
SynthSequence make_synth(const SynthSpec& spec);

// Materializes make_synth output as `img/%04d.png` plus a 1-based
// groundtruth_rect.txt, loadable by load_sequence.
void write_synth(const SynthSpec& spec, const std::string& out_dir);

}  // namespace cpcf
