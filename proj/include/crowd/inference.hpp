#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "crowd/domain.hpp"

namespace crowd {

// Beta prior on worker skill.
struct Prior {
    double alpha;
    double beta;

    Prior(double a, double b) : alpha(a), beta(b) {
        if (!(a > 0.0) || !(b > 0.0)) {
            throw ConfigError("prior parameters must be strictly positive");
        }
    }

    double mean() const { return alpha / (alpha + beta); }
};

struct MeanFieldState {
    std::vector<double> posteriors;  // mu_i(+1) per task
    std::vector<double> skills;      // p_hat_j per worker
    int iteration_count = 0;
    bool converged = false;
};

// Task posteriors from fixed skills (the E update). Products are taken in
// log space; a task with no labels gets 0.5.
std::vector<double> e_step(const LabelStore& store, const std::vector<double>& skills);

// Posterior update of one task only; cheaper form used by the online path.
double e_step_task(const LabelStore& store, const std::vector<double>& skills, int task);

// Skill estimates from fixed posteriors (the M update), smoothed by the
// Beta prior. A worker with no labels sits at the prior mean.
std::vector<double> m_step(const LabelStore& store, const std::vector<double>& posteriors,
                           const Prior& prior);

double m_step_worker(const LabelStore& store, const std::vector<double>& posteriors,
                     const Prior& prior, int worker);

// Called after each iteration of fit with the freshly updated state;
// used by tests to inspect per-iteration trajectories.
using FitObserver = std::function<void(int iteration, const MeanFieldState&)>;

// Alternates e_step / m_step starting from skills at the prior mean (or
// from `initial_skills` when given) until the largest posterior change is
// <= tol or max_iter is reached.
MeanFieldState fit(const LabelStore& store, const Prior& prior, double tol = 1e-6,
                   int max_iter = 100,
                   const std::optional<std::vector<double>>& initial_skills = std::nullopt,
                   const FitObserver& observer = nullptr);

// One online iteration after `record` was inserted into `store`: the
// affected task's posterior is recomputed from current skills, then the
// affected worker's skill from current posteriors. Nothing else moves.
void online_update(MeanFieldState& state, const LabelStore& store, const LabelRecord& record,
                   const Prior& prior);

}  // namespace crowd
