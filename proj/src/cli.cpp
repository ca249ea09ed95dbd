#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cpcf/cli.hpp"
#include "cpcf/consistency.hpp"
#include "cpcf/image_io.hpp"
#include "cpcf/oracle.hpp"
#include "cpcf/signal.hpp"

namespace fs = std::filesystem;

namespace cpcf {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::invalid_argument("config: bad value for '" + key + "': '" +
                                value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) bad_value(key, value);
        return v;
    } catch (const std::invalid_argument&) {
        bad_value(key, value);
    } catch (const std::out_of_range&) {
        bad_value(key, value);
    }
}

long long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) bad_value(key, value);
        return v;
    } catch (const std::invalid_argument&) {
        bad_value(key, value);
    } catch (const std::out_of_range&) {
        bad_value(key, value);
    }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    const long long v = parse_integer(key, value);
    if (v < 0) bad_value(key, value);
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    bad_value(key, value);
}

BoundingBox parse_box(const std::string& key, const std::string& value) {
    std::string norm = value;
    for (char& c : norm)
        if (c == ',') c = ' ';
    std::istringstream in(norm);
    double v[4];
    if (!(in >> v[0] >> v[1] >> v[2] >> v[3]) || !(in >> std::ws).eof())
        bad_value(key, value);
    return BoundingBox{v[0], v[1], v[2], v[3]};
}

std::string fmt_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Splits "key = value" (or "key=value"); '#' starts a comment.
bool split_kv(const std::string& raw, std::string& key, std::string& value) {
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) return false;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("config: expected key = value, got '" +
                                    trim(raw) + "'");
    key = trim(line.substr(0, eq));
    value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config: empty key");
    return true;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key,
                   const std::string& value, const std::string& origin) {
    TrackerConfig& t = cfg.tracker;
    if (key == "gamma") t.gamma = parse_real(key, value);
    else if (key == "h_min") t.h_min = parse_real(key, value);
    else if (key == "h_max") t.h_max = parse_real(key, value);
    else if (key == "alpha") t.alpha = parse_real(key, value);
    else if (key == "beta") t.beta = parse_real(key, value);
    else if (key == "eta") t.eta = parse_real(key, value);
    else if (key == "cell_size") t.cell_size = parse_size(key, value);
    else if (key == "padding_area") t.padding_area = parse_real(key, value);
    else if (key == "max_model_area") t.max_model_area = parse_size(key, value);
    else if (key == "label_sigma_factor")
        t.label_sigma_factor = parse_real(key, value);
    else if (key == "scale_count") t.scale_count = parse_size(key, value);
    else if (key == "scale_step") t.scale_step = parse_real(key, value);
    else if (key == "scale_penalty") t.scale_penalty = parse_real(key, value);
    else if (key == "admm_iters") t.admm_iters = parse_size(key, value);
    else if (key == "nu0") t.admm.nu0 = parse_real(key, value);
    else if (key == "nu_scale") t.admm.nu_scale = parse_real(key, value);
    else if (key == "nu_max") t.admm.nu_max = parse_real(key, value);
    else if (key == "sidelobe_margin")
        t.sidelobe_margin = parse_real(key, value);
    else if (key == "spatial_mu") t.spatial_mu = parse_real(key, value);
    else if (key == "spatial_theta") t.spatial_theta = parse_real(key, value);
    else if (key == "seq") cfg.seq_dir = value;
    else if (key == "dataset") cfg.dataset_dir = value;
    else if (key == "spec") cfg.spec_file = value;
    else if (key == "out") cfg.out_dir = value;
    else if (key == "init") cfg.init = parse_box(key, value);
    else if (key == "seed")
        cfg.seed = static_cast<unsigned>(parse_size(key, value));
    else if (key == "threads") {
        const std::size_t n = parse_size(key, value);
        if (n == 0) bad_value(key, value);
        cfg.threads = n;
    } else if (key == "perturb") cfg.perturb = parse_bool(key, value);
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
    cfg.overrides.push_back({key, value, origin});
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string line, key, value;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        try {
            if (split_kv(line, key, value))
                apply_setting(cfg, key, value, "file");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": " + e.what());
        }
    }
}

std::string effective_config(const RunConfig& cfg) {
    std::ostringstream out;
    const TrackerConfig& t = cfg.tracker;
    out << "command = " << cfg.command << '\n';
    if (!cfg.seq_dir.empty()) out << "seq = " << cfg.seq_dir << '\n';
    if (!cfg.dataset_dir.empty()) out << "dataset = " << cfg.dataset_dir << '\n';
    if (!cfg.spec_file.empty()) out << "spec = " << cfg.spec_file << '\n';
    if (!cfg.out_dir.empty()) out << "out = " << cfg.out_dir << '\n';
    if (cfg.init)
        out << "init = " << fmt_real(cfg.init->x) << ',' << fmt_real(cfg.init->y)
            << ',' << fmt_real(cfg.init->w) << ',' << fmt_real(cfg.init->h)
            << '\n';
    out << "seed = " << cfg.seed << '\n';
    out << "threads = " << cfg.threads << '\n';
    out << "gamma = " << fmt_real(t.gamma) << '\n';
    out << "h_min = " << fmt_real(t.h_min) << '\n';
    out << "h_max = " << fmt_real(t.h_max) << '\n';
    out << "alpha = " << fmt_real(t.alpha) << '\n';
    out << "beta = " << fmt_real(t.beta) << '\n';
    out << "eta = " << fmt_real(t.eta) << '\n';
    out << "cell_size = " << t.cell_size << '\n';
    out << "padding_area = " << fmt_real(t.padding_area) << '\n';
    out << "max_model_area = " << t.max_model_area << '\n';
    out << "label_sigma_factor = " << fmt_real(t.label_sigma_factor) << '\n';
    out << "scale_count = " << t.scale_count << '\n';
    out << "scale_step = " << fmt_real(t.scale_step) << '\n';
    out << "scale_penalty = " << fmt_real(t.scale_penalty) << '\n';
    out << "admm_iters = " << t.admm_iters << '\n';
    out << "nu0 = " << fmt_real(t.admm.nu0) << '\n';
    out << "nu_scale = " << fmt_real(t.admm.nu_scale) << '\n';
    out << "nu_max = " << fmt_real(t.admm.nu_max) << '\n';
    out << "sidelobe_margin = " << fmt_real(t.sidelobe_margin) << '\n';
    out << "spatial_mu = " << fmt_real(t.spatial_mu) << '\n';
    out << "spatial_theta = " << fmt_real(t.spatial_theta) << '\n';
    if (cfg.overrides.empty()) {
        out << "# overrides: none\n";
    } else {
        out << "# overrides:";
        for (const ConfigOverride& o : cfg.overrides)
            out << ' ' << o.key << '=' << o.value << '(' << o.origin << ')';
        out << '\n';
    }
    return out.str();
}

SynthSpec parse_synth_spec(const std::string& path, unsigned default_seed) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("synth spec: cannot open " + path);
    SynthSpec spec;
    spec.seed = default_seed;
    std::string line, key, value;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        try {
            if (!split_kv(line, key, value)) continue;
            if (key == "pattern") spec.pattern = value;
            else if (key == "frame_w") spec.frame_w = parse_size(key, value);
            else if (key == "frame_h") spec.frame_h = parse_size(key, value);
            else if (key == "target_w") spec.target_w = parse_real(key, value);
            else if (key == "target_h") spec.target_h = parse_real(key, value);
            else if (key == "start_x") spec.start_x = parse_real(key, value);
            else if (key == "start_y") spec.start_y = parse_real(key, value);
            else if (key == "motion_x") spec.motion_x = parse_real(key, value);
            else if (key == "motion_y") spec.motion_y = parse_real(key, value);
            else if (key == "frames") spec.frames = parse_size(key, value);
            else if (key == "scale_ramp")
                spec.scale_ramp = parse_real(key, value);
            else if (key == "noise_sigma")
                spec.noise_sigma = parse_real(key, value);
            else if (key == "appearance_swap_frame")
                spec.appearance_swap_frame = parse_size(key, value);
            else if (key == "seed")
                spec.seed = static_cast<unsigned>(parse_size(key, value));
            else if (key == "color") spec.color = parse_bool(key, value);
            else
                throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": " + e.what());
        }
    }
    return spec;
}

// ---------------------------------------------------------------------------
// verify

namespace {

Grid2D random_grid(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                   double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Grid2D g(rows, cols);
    for (auto& v : g) v = dist(rng);
    return g;
}

// Training instance whose per-bin curvature is clustered near the fixed
// check penalty, so cold-start ADMM reaches oracle agreement in few rounds.
TrainingProblem verify_problem(std::mt19937_64& rng, std::size_t rows,
                               std::size_t cols, std::size_t channels,
                               double gamma) {
    const double amp = std::sqrt(42.0 / static_cast<double>(rows * cols));
    TrainingProblem p;
    for (std::size_t d = 0; d < channels; ++d)
        p.x_hat.push_back(dft2(random_grid(rng, rows, cols, -amp, amp)));
    const Grid2D y = gaussian_label(
        rows, cols, std::max(1.0, static_cast<double>(rows) / 8.0), rows / 2,
        cols / 2);
    p.y_hat = dft2(y);
    if (gamma > 0.0) {
        Grid2D r = gaussian_label(rows, cols, 1.2, 0, 0);
        const Grid2D noise = random_grid(rng, rows, cols, -0.02, 0.02);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = 0.3 * r[k] + noise[k];
        p.r_hat = dft2(r);
        p.l_hat = dft2(dynamic_label(0.9, fixed_label(y)).grid);
        p.gamma = gamma;
    }
    p.spatial_weight =
        spatial_weight(rows / 2.0, cols / 2.0, rows, cols, 3.0, 0.2);
    return p;
}

double rel_err_channels(const std::vector<Grid2D>& got,
                        const std::vector<Grid2D>& want) {
    double err = 0.0, norm = 0.0;
    for (std::size_t d = 0; d < want.size(); ++d)
        for (std::size_t k = 0; k < want[d].size(); ++k) {
            err = std::max(err, std::abs(got[d][k] - want[d][k]));
            norm = std::max(norm, std::abs(want[d][k]));
        }
    return err / norm;
}

// Matched fixed penalty for oracle comparisons from a cold start; the
// runtime default ramps the penalty for warm-started per-frame refinement.
AdmmParams check_schedule() { return AdmmParams{10.0, 1.0, 10.0}; }

Grid2D corr_brute(const Grid2D& a, const Grid2D& b) {
    const std::size_t M = a.rows(), N = a.cols();
    Grid2D out(M, N);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            double acc = 0.0;
            for (std::size_t u = 0; u < M; ++u)
                for (std::size_t v = 0; v < N; ++v)
                    acc += a(u, v) * b((u + i) % M, (v + j) % N);
            out(i, j) = acc;
        }
    return out;
}

bool check_oracle(bool perturb) {
    std::mt19937_64 rng(101);
    TrainingProblem p = verify_problem(rng, 10, 8, 2, 0.9);
    const std::vector<Grid2D> oracle = oracle_solve(p);
    FilterStack st =
        solve_filter(p, make_filter_stack(2, 10, 8, 10.0), 20, check_schedule());
    if (perturb) st.w[0][0] += 0.01 * (1.0 + std::abs(st.w[0][0]));
    return rel_err_channels(st.w, oracle) < 1e-4;
}

bool check_gamma_deleted() {
    std::mt19937_64 rng(102);
    TrainingProblem p = verify_problem(rng, 10, 8, 2, 0.0);
    const std::vector<Grid2D> oracle = oracle_solve(p);
    FilterStack st =
        solve_filter(p, make_filter_stack(2, 10, 8, 10.0), 60, check_schedule());
    return rel_err_channels(st.w, oracle) < 1e-6;
}

bool check_rank1_bins() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> nud(0.5, 20.0);
    auto z = [&] { return std::complex<double>(unit(rng), unit(rng)); };
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t D = std::array<std::size_t, 4>{1, 2, 3, 8}[rep % 4];
        std::vector<std::complex<double>> x(D), zeta(D), w(D), g(D);
        for (auto& v : x) v = z();
        for (auto& v : zeta) v = z();
        for (auto& v : w) v = z();
        const std::complex<double> y = z(), r = z(), l = z();
        const double gamma = rep % 2 == 0 ? 0.9 : 0.0;
        const double nu = nud(rng);
        solve_bin(x.data(), D, y, true, r, l, gamma, zeta.data(), w.data(), nu,
                  g.data());
        const auto ref = dense_bin_solve(x, y, true, r, l, gamma, zeta, w, nu);
        double err = 0.0, norm = 1.0;
        for (std::size_t d = 0; d < D; ++d) {
            err = std::max(err, std::abs(g[d] - ref[d]));
            norm = std::max(norm, std::abs(ref[d]));
        }
        if (err / norm >= 1e-10) return false;
    }
    return true;
}

bool check_parseval() {
    std::mt19937_64 rng(104);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t M = 4 + rep % 13, N = 4 + (rep * 7) % 13;
        const Grid2D g = random_grid(rng, M, N, -1.0, 1.0);
        const Spectrum2D s = dft2(g);
        double spatial = 0.0, spectral = 0.0;
        for (double v : g) spatial += v * v;
        for (const auto& v : s) spectral += std::norm(v);
        const double want = spatial * static_cast<double>(M * N);
        if (std::abs(spectral - want) > 1e-9 * std::max(1.0, want))
            return false;
    }
    return true;
}

bool check_correlation() {
    std::mt19937_64 rng(105);
    for (int rep = 0; rep < 10; ++rep) {
        const Grid2D a = random_grid(rng, 8, 6, -1.0, 1.0);
        const Grid2D b = random_grid(rng, 8, 6, -1.0, 1.0);
        const Grid2D fast = cyclic_correlate(a, b);
        const Grid2D slow = corr_brute(a, b);
        for (std::size_t k = 0; k < fast.size(); ++k)
            if (std::abs(fast[k] - slow[k]) > 1e-9) return false;
    }
    return true;
}

bool check_consistency_fixed_point() {
    const Grid2D y = gaussian_label(12, 16, 1.5, 6, 8);
    const ResponseMap resp(y);
    const Grid2D c = consistency_map(resp, resp).grid;
    const Grid2D lf = fixed_label(y);
    for (std::size_t k = 0; k < c.size(); ++k)
        if (std::abs(c[k] - lf[k]) > 1e-9) return false;
    return true;
}

bool check_consistency_shift_invariance() {
    std::mt19937_64 rng(106);
    const Grid2D y = gaussian_label(12, 16, 1.5, 6, 8);
    const ResponseMap target(y);
    const Grid2D base = consistency_map(target, ResponseMap(y)).grid;
    std::uniform_int_distribution<int> dr(0, 11), dc(0, 15);
    for (int rep = 0; rep < 10; ++rep) {
        const ShiftVector s{dr(rng), dc(rng)};
        const ResponseMap shifted(circ_shift(y, s));
        const Grid2D c = consistency_map(target, shifted).grid;
        for (std::size_t k = 0; k < c.size(); ++k)
            if (std::abs(c[k] - base[k]) > 1e-9) return false;
    }
    return true;
}

bool check_dynamic_factor() {
    for (double value : {-50.0, 0.0, 10.0, 25.0, 50.0, 500.0}) {
        PsrmScore score;
        score.value = value;
        const double h = dynamic_factor(score, 0.6, 1.2, 50.0);
        if (!(h >= 0.6 && h <= 1.2)) return false;
    }
    // A flat response carries no quality signal and must pin h at h_min.
    const PsrmScore flat = psrm(ResponseMap(Grid2D(12, 12, 0.0)), 100.0, 0.15);
    return dynamic_factor(flat, 0.6, 1.2, 50.0) == 0.6;
}

}  // namespace

std::vector<VerifyCheck> run_verify_checks(bool perturb) {
    std::vector<VerifyCheck> checks;
    checks.push_back({"solver matches dense oracle (consistency on)",
                      check_oracle(perturb)});
    checks.push_back(
        {"solver matches gamma-deleted oracle (gamma=0)", check_gamma_deleted()});
    checks.push_back({"rank-1 bin solve matches dense solve", check_rank1_bins()});
    checks.push_back({"spectral energy identity", check_parseval()});
    checks.push_back(
        {"fast correlation matches brute force", check_correlation()});
    checks.push_back({"consistency of ideal responses equals fixed label",
                      check_consistency_fixed_point()});
    checks.push_back({"consistency invariant to detection shifts",
                      check_consistency_shift_invariance()});
    checks.push_back({"dynamic factor bounded, flat response pins h_min",
                      check_dynamic_factor()});
    return checks;
}

int cmd_verify(const RunConfig& cfg) {
    const std::vector<VerifyCheck> checks = run_verify_checks(cfg.perturb);
    std::size_t passed = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        std::printf("%2zu/%zu  %-52s %s\n", i + 1, checks.size(),
                    checks[i].name.c_str(), checks[i].pass ? "pass" : "FAIL");
        if (checks[i].pass) ++passed;
    }
    std::printf("%zu checks, %zu passed\n", checks.size(), passed);
    return passed == checks.size() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// track

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

int cmd_track(const RunConfig& cfg) try {
    if (cfg.seq_dir.empty())
        throw std::invalid_argument("track: a sequence directory is required");
    if (cfg.out_dir.empty())
        throw std::invalid_argument("track: an output directory is required");

    std::vector<std::string> paths;
    BoundingBox init;
    if (cfg.init) {
        // Ground truth is optional when the start box comes from the caller;
        // the init box uses the annotation files' 1-based convention.
        paths = list_frames(cfg.seq_dir);
        init = {cfg.init->x - 1.0, cfg.init->y - 1.0, cfg.init->w, cfg.init->h};
    } else {
        const Sequence seq = load_sequence(cfg.seq_dir);
        paths = seq.frame_paths;
        init = *seq.ground_truth.front();
    }

    Tracker tracker(load_image(paths.front()), init, cfg.tracker);
    std::ostringstream boxes, diags;
    boxes << fmt6(init.x + 1.0) << ',' << fmt6(init.y + 1.0) << ','
          << fmt6(init.w) << ',' << fmt6(init.h) << '\n';
    diags << "frame,psrm,h,peak\n";
    for (std::size_t k = 1; k < paths.size(); ++k) {
        const BoundingBox box = tracker.step(load_image(paths[k]));
        boxes << fmt6(box.x + 1.0) << ',' << fmt6(box.y + 1.0) << ','
              << fmt6(box.w) << ',' << fmt6(box.h) << '\n';
        diags << (k + 1) << ',' << fmt6(tracker.last_psrm()) << ','
              << fmt6(tracker.last_h()) << ',' << fmt6(tracker.last_peak())
              << '\n';
    }

    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    write_text(out / "bboxes.txt", boxes.str());
    write_text(out / "diagnostics.csv", diags.str());
    write_text(out / "config.txt", effective_config(cfg));
    return 0;
} catch (const std::exception& e) {
    std::cerr << "cpcf track: " << e.what() << '\n';
    return 1;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const RunConfig& cfg) try {
    if (cfg.dataset_dir.empty())
        throw std::invalid_argument("bench: a dataset directory is required");
    if (cfg.out_dir.empty())
        throw std::invalid_argument("bench: an output directory is required");
    if (!fs::is_directory(cfg.dataset_dir))
        throw std::invalid_argument("bench: not a directory: " +
                                    cfg.dataset_dir);

    std::vector<std::string> seq_dirs;
    for (const auto& entry : fs::directory_iterator(cfg.dataset_dir))
        if (entry.is_directory()) seq_dirs.push_back(entry.path().string());
    std::sort(seq_dirs.begin(), seq_dirs.end());
    if (seq_dirs.empty()) {
        std::cerr << "cpcf bench: no sequences found under " << cfg.dataset_dir
                  << '\n';
        return 1;
    }

    // One tracker per sequence; results land at the sequence's index so the
    // output is identical no matter which worker finishes first.
    std::vector<std::optional<MetricsReport>> results(seq_dirs.size());
    std::vector<std::string> errors(seq_dirs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < seq_dirs.size();
             i = next.fetch_add(1)) {
            try {
                results[i] = run_ope(load_sequence(seq_dirs[i]), cfg.tracker);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::size_t n_threads =
        cfg.threads != 0 ? cfg.threads
                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, seq_dirs.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::vector<MetricsReport> reports;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < seq_dirs.size(); ++i) {
        if (results[i]) {
            reports.push_back(std::move(*results[i]));
        } else {
            ++failed;
            std::cerr << "cpcf bench: " << seq_dirs[i] << ": " << errors[i]
                      << '\n';
        }
    }
    if (reports.empty()) {
        std::cerr << "cpcf bench: all " << failed << " sequences failed\n";
        return 1;
    }

    emit_report(reports, cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "config.txt", effective_config(cfg));
    const MetricsReport agg = aggregate_report(reports);
    std::printf(
        "sequences %zu ok, %zu failed | precision@20 %s  auc %s  fps %s\n",
        reports.size(), failed, fmt6(agg.precision20).c_str(),
        fmt6(agg.auc).c_str(), fmt6(agg.fps).c_str());
    return 0;
} catch (const std::exception& e) {
    std::cerr << "cpcf bench: " << e.what() << '\n';
    return 1;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const RunConfig& cfg) try {
    if (cfg.spec_file.empty())
        throw std::invalid_argument("synth: a spec file is required");
    if (cfg.out_dir.empty())
        throw std::invalid_argument("synth: an output directory is required");
    SynthSpec spec = parse_synth_spec(cfg.spec_file, cfg.seed);
    for (const ConfigOverride& o : cfg.overrides)
        if (o.key == "seed" && o.origin == "flag") spec.seed = cfg.seed;
    write_synth(spec, cfg.out_dir);
    std::printf("wrote %zu frames to %s\n", spec.frames, cfg.out_dir.c_str());
    return 0;
} catch (const std::exception& e) {
    std::cerr << "cpcf synth: " << e.what() << '\n';
    return 1;
}

}  // namespace cpcf
