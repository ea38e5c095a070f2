#include "crowd/inference.hpp"

#include <algorithm>
#include <cmath>

namespace crowd {

double e_step_task(const LabelStore& store, const std::vector<double>& skills, int task) {
    const auto& view = store.task_view(task);
    if (view.empty()) return 0.5;
    // log P(labels | l*=+1) and log P(labels | l*=-1)
    double log_plus = 0.0;
    double log_minus = 0.0;
    for (int idx : view) {
        const LabelRecord& r = store.records()[idx];
        const double p = skills.at(r.worker);
        const double lp = std::log(p);
        const double lq = std::log1p(-p);
        if (r.label.value() == +1) {
            log_plus += lp;
            log_minus += lq;
        } else {
            log_plus += lq;
            log_minus += lp;
        }
    }
    return sigmoid(log_plus - log_minus);
}

std::vector<double> e_step(const LabelStore& store, const std::vector<double>& skills) {
    std::vector<double> posteriors(store.num_tasks(), 0.5);
    for (int i = 0; i < store.num_tasks(); ++i) {
        posteriors[i] = e_step_task(store, skills, i);
    }
    return posteriors;
}

double m_step_worker(const LabelStore& store, const std::vector<double>& posteriors,
                     const Prior& prior, int worker) {
    const auto& view = store.worker_view(worker);
    double sum = 0.0;
    for (int idx : view) {
        const LabelRecord& r = store.records()[idx];
        const double mu_plus = posteriors.at(r.task);
        sum += (r.label.value() == +1) ? mu_plus : 1.0 - mu_plus;
    }
    return (sum + prior.alpha) /
           (static_cast<double>(view.size()) + prior.alpha + prior.beta);
}

std::vector<double> m_step(const LabelStore& store, const std::vector<double>& posteriors,
                           const Prior& prior) {
    std::vector<double> skills(store.num_workers(), prior.mean());
    for (int j = 0; j < store.num_workers(); ++j) {
        skills[j] = m_step_worker(store, posteriors, prior, j);
    }
    return skills;
}

MeanFieldState fit(const LabelStore& store, const Prior& prior, double tol, int max_iter,
                   const std::optional<std::vector<double>>& initial_skills,
                   const FitObserver& observer) {
    if (!(tol > 0.0)) throw ConfigError("fit tolerance must be positive");
    if (max_iter < 1) throw ConfigError("fit requires max_iter >= 1");

    MeanFieldState state;
    state.skills = initial_skills ? *initial_skills
                                  : std::vector<double>(store.num_workers(), prior.mean());
    if (static_cast<int>(state.skills.size()) < store.num_workers()) {
        state.skills.resize(store.num_workers(), prior.mean());
    }
    state.posteriors.assign(store.num_tasks(), 0.5);

    for (int iter = 1; iter <= max_iter; ++iter) {
        std::vector<double> next = e_step(store, state.skills);
        double max_change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            max_change = std::max(max_change, std::abs(next[i] - state.posteriors[i]));
        }
        state.posteriors = std::move(next);
        state.skills = m_step(store, state.posteriors, prior);
        state.iteration_count = iter;
        if (observer) observer(iter, state);
        if (max_change <= tol) {
            state.converged = true;
            break;
        }
    }
    return state;
}

void online_update(MeanFieldState& state, const LabelStore& store, const LabelRecord& record,
                   const Prior& prior) {
    if (record.task >= static_cast<int>(state.posteriors.size())) {
        state.posteriors.resize(record.task + 1, 0.5);
    }
    if (record.worker >= static_cast<int>(state.skills.size())) {
        state.skills.resize(record.worker + 1, prior.mean());
    }
    state.posteriors[record.task] = e_step_task(store, state.skills, record.task);
    state.skills[record.worker] = m_step_worker(store, state.posteriors, prior, record.worker);
}

}  // namespace crowd
