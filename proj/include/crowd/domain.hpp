#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "crowd/common.hpp"
#include "crowd/rng.hpp"

namespace crowd {

// Binary label, restricted to {+1, -1}.
class Label {
public:
    static Label plus() { return Label(+1); }
    static Label minus() { return Label(-1); }

    static Label from_int(int v) {
        if (v != +1 && v != -1) {
            throw ConfigError("label must be +1 or -1");
        }
        return Label(v);
    }

    static Label from_sign(double x, Rng& tie_rng) {
        if (x > 0.0) return plus();
        if (x < 0.0) return minus();
        return Label(tie_rng.coin_sign());
    }

    int value() const { return value_; }
    Label flipped() const { return Label(-value_); }

    bool operator==(const Label&) const = default;

private:
    explicit Label(int v) : value_(v) {}
    int value_;
};

// Population law of worker accuracies.
struct BetaSkill {
    double alpha;
    double beta;
};

struct DiracSkill {
    double p;
};

struct EmpiricalSkill {
    std::vector<std::pair<double, double>> points;  // (skill, mass)
};

class SkillDistribution {
public:
    using Variant = std::variant<BetaSkill, DiracSkill, EmpiricalSkill>;

    static SkillDistribution beta(double alpha, double beta);
    static SkillDistribution dirac(double p);
    static SkillDistribution empirical(std::vector<std::pair<double, double>> points);

    const Variant& variant() const { return v_; }
    bool is_dirac() const { return std::holds_alternative<DiracSkill>(v_); }

    double mean() const;

private:
    explicit SkillDistribution(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

double sample_skill(const SkillDistribution& dist, Rng& rng);

// The worker's vote equals the true label with probability `skill`.
Label generate_label(Label true_label, double skill, Rng& rng);

struct Worker {
    int id;
    double skill;  // in (0,1)
};

struct LabelRecord {
    int task;
    int worker;
    Label label;

    bool operator==(const LabelRecord&) const = default;
};

// Sparse (task, worker, label) collection with per-task and per-worker
// views. A (task, worker) pair may appear at most once.
class LabelStore {
public:
    // Returns false and leaves the store unchanged if (task, worker) is
    // already present.
    bool insert(int task, int worker, Label label);

    bool contains(int task, int worker) const;

    const std::vector<LabelRecord>& records() const { return records_; }

    // Indices into records() for one task / one worker.
    const std::vector<int>& task_view(int task) const;
    const std::vector<int>& worker_view(int worker) const;

    int num_tasks() const { return static_cast<int>(by_task_.size()); }
    int num_workers() const { return static_cast<int>(by_worker_.size()); }
    std::size_t size() const { return records_.size(); }

    // Store with every label negated; views keep identical shape.
    LabelStore flipped() const;

private:
    std::vector<LabelRecord> records_;
    std::vector<std::vector<int>> by_task_;
    std::vector<std::vector<int>> by_worker_;
};

// Per-task log-odds and posteriors plus per-worker skill estimates
// maintained during a simulation run.
struct BeliefState {
    std::vector<double> task_logodds;    // z_i
    std::vector<double> task_posterior;  // mu_i(+1)
    std::vector<double> worker_estimate; // p_hat_j, grown on demand

    explicit BeliefState(int num_tasks)
        : task_logodds(num_tasks, 0.0), task_posterior(num_tasks, 0.5) {}

    void ensure_worker(int worker, double initial);
};

enum class PolicyKind { Uniform, Uncertainty, GreedyInfoGain };

struct OracleMode {};

struct InferenceMode {
    double prior_alpha;
    double prior_beta;
};

using Mode = std::variant<OracleMode, InferenceMode>;

struct ExperimentConfig {
    int num_tasks = 0;                // M
    long budget = 0;                  // B
    int labels_per_worker = 1;        // |N_j| in inference mode
    SkillDistribution population = SkillDistribution::dirac(0.8);
    PolicyKind policy = PolicyKind::Uniform;
    Mode mode = OracleMode{};
    int replications = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

const char* policy_name(PolicyKind p);

}  // namespace crowd
