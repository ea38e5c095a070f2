#include "crowd/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crowd {

SkillDistribution SkillDistribution::beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw ConfigError("beta population requires strictly positive parameters");
    }
    return SkillDistribution(BetaSkill{alpha, beta});
}

SkillDistribution SkillDistribution::dirac(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw ConfigError("dirac population requires p strictly inside (0,1)");
    }
    return SkillDistribution(DiracSkill{p});
}

SkillDistribution SkillDistribution::empirical(std::vector<std::pair<double, double>> points) {
    if (points.empty()) {
        throw ConfigError("empirical population requires at least one point");
    }
    double total = 0.0;
    for (const auto& [p, mass] : points) {
        if (!(p > 0.0) || !(p < 1.0)) {
            throw ConfigError("empirical skill points must lie strictly inside (0,1)");
        }
        if (mass < 0.0) {
            throw ConfigError("empirical masses must be nonnegative");
        }
        total += mass;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("empirical masses must sum to 1");
    }
    return SkillDistribution(EmpiricalSkill{std::move(points)});
}

double SkillDistribution::mean() const {
    struct Visitor {
        double operator()(const BetaSkill& b) const { return b.alpha / (b.alpha + b.beta); }
        double operator()(const DiracSkill& d) const { return d.p; }
        double operator()(const EmpiricalSkill& e) const {
            double m = 0.0;
            for (const auto& [p, mass] : e.points) m += p * mass;
            return m;
        }
    };
    return std::visit(Visitor{}, v_);
}

double sample_skill(const SkillDistribution& dist, Rng& rng) {
    struct Visitor {
        Rng& rng;
        double operator()(const BetaSkill& b) const { return rng.beta(b.alpha, b.beta); }
        double operator()(const DiracSkill& d) const { return d.p; }
        double operator()(const EmpiricalSkill& e) const {
            double u = rng.uniform01();
            for (const auto& [p, mass] : e.points) {
                if (u < mass) return p;
                u -= mass;
            }
            return e.points.back().first;
        }
    };
    double p = std::visit(Visitor{rng}, dist.variant());
    // Beta draws can round to the boundary for extreme parameters; nudge
    // inside so downstream logit() stays finite.
    const double eps = 1e-15;
    return std::clamp(p, eps, 1.0 - eps);
}

Label generate_label(Label true_label, double skill, Rng& rng) {
    if (!(skill > 0.0) || !(skill < 1.0)) {
        throw ConfigError("worker skill must lie strictly inside (0,1)");
    }
    return rng.bernoulli(skill) ? true_label : true_label.flipped();
}

bool LabelStore::insert(int task, int worker, Label label) {
    if (task < 0 || worker < 0) {
        throw ConfigError("task and worker ids must be nonnegative");
    }
    if (contains(task, worker)) {
        return false;
    }
    if (task >= static_cast<int>(by_task_.size())) by_task_.resize(task + 1);
    if (worker >= static_cast<int>(by_worker_.size())) by_worker_.resize(worker + 1);
    const int idx = static_cast<int>(records_.size());
    records_.push_back(LabelRecord{task, worker, label});
    by_task_[task].push_back(idx);
    by_worker_[worker].push_back(idx);
    return true;
}

bool LabelStore::contains(int task, int worker) const {
    if (task < 0 || task >= static_cast<int>(by_task_.size())) return false;
    for (int idx : by_task_[task]) {
        if (records_[idx].worker == worker) return true;
    }
    return false;
}

const std::vector<int>& LabelStore::task_view(int task) const {
    static const std::vector<int> empty;
    if (task < 0 || task >= static_cast<int>(by_task_.size())) return empty;
    return by_task_[task];
}

const std::vector<int>& LabelStore::worker_view(int worker) const {
    static const std::vector<int> empty;
    if (worker < 0 || worker >= static_cast<int>(by_worker_.size())) return empty;
    return by_worker_[worker];
}

LabelStore LabelStore::flipped() const {
    LabelStore out;
    for (const auto& r : records_) {
        out.insert(r.task, r.worker, r.label.flipped());
    }
    return out;
}

void BeliefState::ensure_worker(int worker, double initial) {
    if (worker >= static_cast<int>(worker_estimate.size())) {
        worker_estimate.resize(worker + 1, initial);
    }
}

void ExperimentConfig::validate() const {
    if (num_tasks <= 0) throw ConfigError("tasks must be positive");
    if (budget <= 0) throw ConfigError("budget must be positive");
    if (labels_per_worker <= 0) throw ConfigError("labels_per_worker must be positive");
    if (labels_per_worker > num_tasks) {
        throw ConfigError("labels_per_worker cannot exceed tasks: a worker labels a task at most once");
    }
    if (policy == PolicyKind::Uniform && budget < num_tasks) {
        throw ConfigError("uniform policy requires budget >= tasks");
    }
    if (replications <= 0) throw ConfigError("replications must be positive");
    if (const auto* inf = std::get_if<InferenceMode>(&mode)) {
        if (!(inf->prior_alpha > 0.0) || !(inf->prior_beta > 0.0)) {
            throw ConfigError("prior parameters must be strictly positive");
        }
        if (!(inf->prior_alpha > inf->prior_beta)) {
            throw ConfigError("inference mode requires prior_alpha > prior_beta so the "
                              "global label flip is resolved toward accurate workers");
        }
    }
}

const char* policy_name(PolicyKind p) {
    switch (p) {
        case PolicyKind::Uniform: return "uniform";
        case PolicyKind::Uncertainty: return "uncertainty";
        case PolicyKind::GreedyInfoGain: return "greedy_ig";
    }
    return "?";
}

}  // namespace crowd
