#pragma once

#include <string>
#include <vector>

#include "crowd/domain.hpp"

namespace crowd {

struct RunResult {
    double accuracy;                        // fraction of tasks classified correctly
    std::vector<long> labels_per_task;      // histogram: [c] = # tasks with c labels
    double mean_abs_logodds;
    long rounds_executed;                   // labels actually collected, <= budget
    long unassignable_workers;

    bool operator==(const RunResult&) const = default;
};

struct ReplicationStats {
    double mean_accuracy;
    double standard_error;
    int n;
};

// One full round protocol: sample truths, spend the budget one worker at a
// time under the configured policy, classify, score. Deterministic given
// (cfg, replication_index).
RunResult run_once(const ExperimentConfig& cfg, int replication_index);

// All replications on independent substreams, aggregated in index order
// regardless of how many threads run them.
ReplicationStats run_experiment(const ExperimentConfig& cfg, int jobs = 1);

ReplicationStats aggregate_stats(const std::vector<double>& accuracies);

enum class SweepAxis { Tasks, BudgetRatio, LabelsPerWorker };

const char* sweep_axis_name(SweepAxis axis);

struct SweepCell {
    PolicyKind policy;
    ReplicationStats stats{0.0, 0.0, 0};
    std::string error;  // nonempty when this cell failed
};

struct SweepRow {
    double point;
    std::vector<SweepCell> cells;
};

// Runs every point of the axis for every policy, sharing the base seed so
// policies face the same worker population draw for draw. Per-point
// failures are recorded in the row instead of aborting the sweep.
std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            const std::vector<double>& points,
                            const std::vector<PolicyKind>& policies, int jobs = 1);

}  // namespace crowd
