#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mcprobe/probesim.hpp"
#include "mcprobe/routes.hpp"

namespace mcprobe {

struct ExperimentConfig {
    std::string topology = "ideal";  // alias or path, echoed in reports
    std::string measurement_node;  // empty: topology default
    RouteParams route;
    LossSpec loss;
    std::int64_t packets = 100000;
    double threshold = 0.1;
    int trials = 1000;
    std::uint64_t seed = 1;
    bool exact_counts = false;  // noise-free counts instead of sampling
};

/// Throws ConfigError for trials < 1, packets < 1, a threshold outside (0, 1)
/// or a malformed loss spec.
void validate(const ExperimentConfig& cfg);

struct TrialResult {
    int trial = 0;
    int accesses = 0;
    bool exact_match = false;
    int found_count = 0;
    int unresolved = 0;
    double recall = 0;
};

struct ExperimentAggregates {
    double mean_accesses = 0;
    double stdev_accesses = 0;  // sample
    double accuracy = 0;
    double mean_recall = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string route_name;
    RouteStats route;
    std::vector<TrialResult> trials;  // by trial index
    ExperimentAggregates aggregates;
};

/// One trial: draw losses, probe, locate. Pure in (tree, cfg, trial).
[[nodiscard]] TrialResult run_trial(const Topology& t, const RouteTree& rt, const ExperimentConfig& cfg, int trial);

/// Trials spread over `jobs` threads (0 = runtime default). The result does
/// not depend on the thread count.
[[nodiscard]] ExperimentReport run_experiment(const Topology& t, const ExperimentConfig& cfg, int jobs = 0);
/// Reference implementation: one trial after another.
[[nodiscard]] ExperimentReport run_experiment_serial(const Topology& t, const ExperimentConfig& cfg);

[[nodiscard]] ExperimentAggregates aggregate(const std::vector<TrialResult>& trials);

void write_report_json(std::ostream& out, const std::vector<ExperimentReport>& reports, bool with_timestamp = true);
void write_trials_csv(std::ostream& out, const ExperimentReport& report);
/// One row per run: route, loss environment, packets, aggregates.
void write_summary_csv(std::ostream& out, const std::vector<ExperimentReport>& reports);

// ---------------------------------------------------------------------------
// Sweep files: "key = value" lines, '#' comments. List-valued keys take
// comma-separated values and the sweep runs their cartesian product.
//
//   topology = ideal            scheme = unicursal, bbt-t1
//   mh = A                      seg_len = 8, 4
//   trials = 1000               high_loss_count = 1, 2
//   seed = 7                    high_loss = 0.15:0.2
//   threshold = 0.1             light_loss = 0:0, 0:0.02
//   exact_counts = false        packets = 100000

struct SweepConfig {
    ExperimentConfig base;
    std::vector<Scheme> schemes{Scheme::bbt_t2};
    std::vector<int> seg_lens{8};
    std::vector<int> high_loss_counts{1};
    std::vector<RateRange> light_losses{{0.0, 0.0}};
    std::vector<std::int64_t> packets{100000};
};

/// Throws ConfigError with the offending line number.
[[nodiscard]] SweepConfig parse_sweep(std::istream& in);
/// Applies one "key = value" setting (also used for command-line overrides).
void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value);
/// Expands the product in a fixed order: scheme, seg_len, count, light, packets.
/// seg_len only multiplies BBT schemes.
[[nodiscard]] std::vector<ExperimentConfig> expand(const SweepConfig& sweep);

[[nodiscard]] RateRange parse_range(const std::string& text);

}  // namespace mcprobe
