#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpcf/harness.hpp"
#include "cpcf/tracker.hpp"

namespace cpcf {

// One key=value assignment that changed a default, kept so the run output
// can echo exactly what was overridden and where it came from.
struct ConfigOverride {
    std::string key;
    std::string value;
    std::string origin;  // "file" or "flag"
};

// Everything one command run needs. Tracker parameters default to the
// shipped constants; path fields are filled by the active subcommand.
struct RunConfig {
    std::string command;       // track | bench | synth | verify
    TrackerConfig tracker;
    std::string seq_dir;       // track
    std::string dataset_dir;   // bench
    std::string spec_file;     // synth
    std::string out_dir;
    std::optional<BoundingBox> init;  // track without ground truth; 1-based
    unsigned seed = 1;
    std::size_t threads = 0;   // 0 = logical core count
    bool perturb = false;      // verify: self-test that trips the oracle check
    std::vector<ConfigOverride> overrides;
};

// Applies one setting by key (snake_case, the config-file spelling). Every
// CLI flag funnels through here with the same key, so file and flag settings
// cannot drift apart; flag application after file application gives the
// flag-beats-file precedence. Unknown keys and malformed values raise
// std::invalid_argument.
void apply_setting(RunConfig& cfg, const std::string& key,
                   const std::string& value, const std::string& origin);

// Flat `key = value` text; '#' starts a comment, blank lines are skipped.
void load_config_file(RunConfig& cfg, const std::string& path);

// The full effective configuration as config-file text, every non-default
// assignment echoed at the end. Deterministic: carries no timestamps.
std::string effective_config(const RunConfig& cfg);

// Flat key=value description of a synthetic sequence (pattern, frame_w,
// motion_x, noise_sigma, ...). Unknown keys are errors; absent keys keep the
// SynthSpec defaults except seed, which starts from default_seed.
SynthSpec parse_synth_spec(const std::string& path, unsigned default_seed);

struct VerifyCheck {
    std::string name;
    bool pass = false;
};

// The release-gate self checks: solver vs. dense oracle (with and without
// the consistency term), rank-1 bin solve vs. dense, spectral identities,
// consistency-map contracts, dynamic-factor bounds. `perturb` injects an
// error into the solver output copy under test, proving the oracle check
// can fail.
std::vector<VerifyCheck> run_verify_checks(bool perturb);

// Subcommand bodies behind the `cpcf` binary; also callable in-process so
// tests exercise the exact shipping code paths. Each returns a process exit
// code and reports failures on stderr instead of throwing.
int cmd_track(const RunConfig& cfg);
int cmd_bench(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

}  // namespace cpcf
