#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cpcf/harness.hpp"
#include "cpcf/image_io.hpp"

namespace fs = std::filesystem;

namespace cpcf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Numeric value of the digit run in a frame filename, for numeric sort.
long long frame_number(const fs::path& p) {
    const std::string stem = p.stem().string();
    long long value = -1;
    for (std::size_t i = 0; i < stem.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(stem[i]))) continue;
        std::size_t end = i;
        while (end < stem.size() &&
               std::isdigit(static_cast<unsigned char>(stem[end])))
            ++end;
        value = std::stoll(stem.substr(i, end - i));
        i = end;
    }
    return value;
}

std::optional<BoundingBox> parse_annotation(const std::string& line,
                                            std::size_t line_no,
                                            const std::string& path) {
    std::string norm = line;
    for (char& c : norm)
        if (c == ',' || c == '\t') c = ' ';
    std::istringstream in(norm);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    if (tokens.empty()) return std::nullopt;  // blank line treated as gap
    if (tokens.size() != 4)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected 4 fields, got " +
                                 std::to_string(tokens.size()));
    double v[4];
    bool any_nan = false;
    for (std::size_t k = 0; k < 4; ++k) {
        try {
            std::size_t used = 0;
            v[k] = std::stod(tokens[k], &used);
            if (used != tokens[k].size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": unparseable field '" + tokens[k] +
                                     "'");
        }
        if (std::isnan(v[k])) any_nan = true;
    }
    if (any_nan) return std::nullopt;
    // Annotations are 1-based; internal coordinates are 0-based.
    return BoundingBox{v[0] - 1.0, v[1] - 1.0, v[2], v[3]};
}

}  // namespace

std::vector<std::string> list_frames(const std::string& dir_path) {
    const fs::path img_dir = fs::path(dir_path) / "img";
    if (!fs::is_directory(img_dir))
        throw std::runtime_error("no img/ directory under " + dir_path);

    std::vector<fs::path> frames;
    for (const auto& entry : fs::directory_iterator(img_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
            frames.push_back(entry.path());
    }
    std::sort(frames.begin(), frames.end(),
              [](const fs::path& a, const fs::path& b) {
                  const long long na = frame_number(a), nb = frame_number(b);
                  if (na != nb) return na < nb;
                  return a.filename().string() < b.filename().string();
              });
    if (frames.empty())
        throw std::runtime_error("no frames under " + img_dir.string());
    std::vector<std::string> out;
    out.reserve(frames.size());
    for (const auto& p : frames) out.push_back(p.string());
    return out;
}

Sequence load_sequence(const std::string& dir_path) {
    const fs::path dir(dir_path);
    const std::vector<std::string> frames = list_frames(dir_path);

    const fs::path gt_path = dir / "groundtruth_rect.txt";
    std::ifstream gt_in(gt_path);
    if (!gt_in)
        throw std::runtime_error("missing ground truth: " + gt_path.string());

    Sequence seq;
    seq.name = dir.filename().string();
    if (seq.name.empty()) seq.name = dir.parent_path().filename().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(gt_in, line)) {
        ++line_no;
        if (line.empty() && gt_in.eof()) break;
        seq.ground_truth.push_back(
            parse_annotation(line, line_no, gt_path.string()));
    }
    // Tolerate one trailing blank line; anything else must match.
    if (!seq.ground_truth.empty() && !seq.ground_truth.back() &&
        seq.ground_truth.size() == frames.size() + 1)
        seq.ground_truth.pop_back();
    if (seq.ground_truth.size() != frames.size())
        throw std::runtime_error(
            dir_path + ": " + std::to_string(frames.size()) + " frames but " +
            std::to_string(seq.ground_truth.size()) + " annotations");
    if (!seq.ground_truth.front() || seq.ground_truth.front()->w <= 0.0 ||
        seq.ground_truth.front()->h <= 0.0)
        throw std::runtime_error(dir_path +
                                 ": first annotation missing or degenerate");

    seq.frame_paths = frames;

    const fs::path attr_path = dir / "attributes.txt";
    if (fs::exists(attr_path)) {
        std::ifstream attr_in(attr_path);
        std::string tag, all;
        while (std::getline(attr_in, tag)) {
            while (!tag.empty() && (tag.back() == '\r' || tag.back() == ' '))
                tag.pop_back();
            if (tag.empty()) continue;
            if (!all.empty()) all += ';';
            all += tag;
        }
        seq.attributes = all;
    }
    return seq;
}

double center_error(const BoundingBox& a, const BoundingBox& b) {
    const double dx = (a.x + a.w / 2.0) - (b.x + b.w / 2.0);
    const double dy = (a.y + a.h / 2.0) - (b.y + b.h / 2.0);
    return std::hypot(dx, dy);
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) -
                                        std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) -
                                        std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

MetricsReport run_ope_frames(const std::string& name,
                             const std::vector<Image>& frames,
                             const std::vector<std::optional<BoundingBox>>& gt,
                             TrackerDriver& driver) {
    if (frames.empty() || frames.size() != gt.size())
        throw std::invalid_argument("run_ope: frame/annotation count mismatch");
    if (!gt.front() || gt.front()->w <= 0.0 || gt.front()->h <= 0.0)
        throw std::invalid_argument("run_ope: first annotation unusable");

    std::vector<BoundingBox> predicted(frames.size());
    driver.init(frames.front(), *gt.front());
    predicted[0] = *gt.front();

    double track_seconds = 0.0;
    for (std::size_t k = 1; k < frames.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        predicted[k] = driver.track(frames[k]);
        const auto t1 = std::chrono::steady_clock::now();
        track_seconds += std::chrono::duration<double>(t1 - t0).count();
    }

    MetricsReport report;
    report.name = name;
    report.cle_per_frame.assign(frames.size(), kNaN);
    report.iou_per_frame.assign(frames.size(), kNaN);
    std::size_t annotated = 0;
    double cle_sum = 0.0;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        if (!gt[k]) continue;
        report.cle_per_frame[k] = center_error(predicted[k], *gt[k]);
        report.iou_per_frame[k] = iou(predicted[k], *gt[k]);
        cle_sum += report.cle_per_frame[k];
        ++annotated;
    }
    if (annotated == 0)
        throw std::invalid_argument("run_ope: no annotated frames");
    report.mean_cle = cle_sum / static_cast<double>(annotated);

    for (std::size_t t = 0; t < report.precision_curve.size(); ++t) {
        std::size_t hits = 0;
        for (double c : report.cle_per_frame)
            if (!std::isnan(c) && c <= static_cast<double>(t)) ++hits;
        report.precision_curve[t] =
            static_cast<double>(hits) / static_cast<double>(annotated);
    }
    for (std::size_t t = 0; t < report.success_curve.size(); ++t) {
        const double thr = static_cast<double>(t) / 100.0;
        std::size_t hits = 0;
        for (double v : report.iou_per_frame)
            if (!std::isnan(v) && v > 0.0 && v >= thr) ++hits;
        report.success_curve[t] =
            static_cast<double>(hits) / static_cast<double>(annotated);
    }
    report.precision20 = report.precision_curve[20];
    double auc = 0.0;
    for (double v : report.success_curve) auc += v;
    report.auc = auc / static_cast<double>(report.success_curve.size());
    report.fps = track_seconds > 0.0
                     ? static_cast<double>(frames.size() - 1) / track_seconds
                     : 0.0;
    return report;
}

namespace {

class CpcfDriver : public TrackerDriver {
public:
    explicit CpcfDriver(const TrackerConfig& cfg) : cfg_(cfg) {}
    void init(const Image& frame, const BoundingBox& box) override {
        tracker_.emplace(frame, box, cfg_);
    }
    BoundingBox track(const Image& frame) override {
        return tracker_->step(frame);
    }

private:
    TrackerConfig cfg_;
    std::optional<Tracker> tracker_;
};

}  // namespace

MetricsReport run_ope(const Sequence& seq, const TrackerConfig& cfg) {
    std::vector<Image> frames;
    frames.reserve(seq.frame_paths.size());
    for (const std::string& p : seq.frame_paths)
        frames.push_back(load_image(p));
    CpcfDriver driver(cfg);
    MetricsReport report =
        run_ope_frames(seq.name, frames, seq.ground_truth, driver);
    report.attributes = seq.attributes;
    return report;
}

MetricsReport aggregate_report(const std::vector<MetricsReport>& reports) {
    if (reports.empty())
        throw std::invalid_argument("aggregate_report: no reports");
    MetricsReport agg;
    agg.name = "aggregate";
    const double n = static_cast<double>(reports.size());
    for (const MetricsReport& r : reports) {
        for (std::size_t t = 0; t < agg.precision_curve.size(); ++t)
            agg.precision_curve[t] += r.precision_curve[t] / n;
        for (std::size_t t = 0; t < agg.success_curve.size(); ++t)
            agg.success_curve[t] += r.success_curve[t] / n;
        agg.precision20 += r.precision20 / n;
        agg.auc += r.auc / n;
        agg.mean_cle += r.mean_cle / n;
        agg.fps += r.fps / n;
    }
    return agg;
}

namespace {

std::string sig6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void emit_report(const std::vector<MetricsReport>& reports,
                 const std::string& out_dir) {
    if (reports.empty()) throw std::invalid_argument("emit_report: no reports");
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    for (const MetricsReport& r : reports) {
        std::ofstream out(dir / (r.name + ".curves.csv"));
        if (!out)
            throw std::runtime_error("cannot write curves for " + r.name);
        out << "metric,threshold,value\n";
        for (std::size_t t = 0; t < r.precision_curve.size(); ++t)
            out << "precision," << t << ',' << sig6(r.precision_curve[t])
                << '\n';
        for (std::size_t t = 0; t < r.success_curve.size(); ++t)
            out << "success," << sig6(static_cast<double>(t) / 100.0) << ','
                << sig6(r.success_curve[t]) << '\n';
    }

    std::ofstream summary(dir / "summary.csv");
    if (!summary) throw std::runtime_error("cannot write summary.csv");
    summary << "name,precision20,auc,mean_cle,attributes\n";
    for (const MetricsReport& r : reports)
        summary << r.name << ',' << sig6(r.precision20) << ',' << sig6(r.auc)
                << ',' << sig6(r.mean_cle) << ',' << r.attributes << '\n';
    const MetricsReport agg = aggregate_report(reports);
    summary << agg.name << ',' << sig6(agg.precision20) << ',' << sig6(agg.auc)
            << ',' << sig6(agg.mean_cle) << ",\n";

    // Timing lives apart from the deterministic artifacts.
    std::ofstream timings(dir / "timings.csv");
    if (!timings) throw std::runtime_error("cannot write timings.csv");
    timings << "name,fps\n";
    for (const MetricsReport& r : reports)
        timings << r.name << ',' << sig6(r.fps) << '\n';
    timings << agg.name << ',' << sig6(agg.fps) << '\n';
}

}  // namespace cpcf
