#include "crowd/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "crowd/aggregation.hpp"
#include "crowd/inference.hpp"
#include "crowd/policy.hpp"

namespace crowd {

namespace {

constexpr double kLogOddsClamp = 50.0;

std::vector<Label> sample_truths(int num_tasks, Rng& rng) {
    std::vector<Label> truths;
    truths.reserve(num_tasks);
    for (int i = 0; i < num_tasks; ++i) {
        truths.push_back(rng.coin_sign() > 0 ? Label::plus() : Label::minus());
    }
    return truths;
}

std::vector<long> count_histogram(const std::vector<int>& counts) {
    const int top = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    std::vector<long> hist(top + 1, 0);
    for (int c : counts) hist[c]++;
    return hist;
}

RunResult score(const std::vector<Label>& truths, const std::vector<int>& counts,
                const std::vector<double>& logodds, const std::vector<Label>& predictions,
                long rounds, long unassignable) {
    const int m = static_cast<int>(truths.size());
    int correct = 0;
    double abs_z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (predictions[i] == truths[i]) ++correct;
        abs_z += std::abs(logodds[i]);
    }
    return RunResult{static_cast<double>(correct) / m, count_histogram(counts), abs_z / m,
                     rounds, unassignable};
}

RunResult run_oracle(const ExperimentConfig& cfg, Rng& rng) {
    const int m = cfg.num_tasks;
    const std::vector<Label> truths = sample_truths(m, rng);
    std::vector<double> logodds(m, 0.0);
    std::vector<int> counts(m, 0);
    std::vector<int> all_tasks(m);
    for (int i = 0; i < m; ++i) all_tasks[i] = i;

    // Each round brings a fresh worker whose true skill is revealed.
    for (long round = 0; round < cfg.budget; ++round) {
        const double skill = sample_skill(cfg.population, rng);
        int task = 0;
        switch (cfg.policy) {
            case PolicyKind::Uniform:
                task = select_uniform(counts, all_tasks);
                break;
            case PolicyKind::Uncertainty:
                task = select_uncertainty(logodds, all_tasks);
                break;
            case PolicyKind::GreedyInfoGain:
                task = select_greedy_ig(logodds, skill, all_tasks);
                break;
        }
        const Label vote = generate_label(truths[task], skill, rng);
        logodds[task] += vote.value() * logit(skill);
        counts[task]++;
    }

    std::vector<Label> predictions;
    predictions.reserve(m);
    for (int i = 0; i < m; ++i) predictions.push_back(classify(logodds[i], rng));
    return score(truths, counts, logodds, predictions, cfg.budget, 0);
}

RunResult run_inference(const ExperimentConfig& cfg, const InferenceMode& inf, Rng& rng) {
    const int m = cfg.num_tasks;
    const Prior prior(inf.prior_alpha, inf.prior_beta);
    const std::vector<Label> truths = sample_truths(m, rng);

    BeliefState belief(m);
    LabelStore store;
    std::vector<int> counts(m, 0);
    std::vector<char> done(m, 0);
    std::vector<int> eligible;
    eligible.reserve(m);

    long labels = 0;
    long unassignable = 0;
    int worker_id = 0;

    while (labels < cfg.budget) {
        const double true_skill = sample_skill(cfg.population, rng);
        belief.ensure_worker(worker_id, prior.mean());
        std::fill(done.begin(), done.end(), 0);

        for (int k = 0; k < cfg.labels_per_worker && labels < cfg.budget; ++k) {
            eligible.clear();
            for (int i = 0; i < m; ++i) {
                if (!done[i]) eligible.push_back(i);
            }
            if (eligible.empty()) {
                ++unassignable;
                break;
            }
            int task = 0;
            switch (cfg.policy) {
                case PolicyKind::Uniform:
                    task = select_uniform(counts, eligible);
                    break;
                case PolicyKind::Uncertainty:
                    task = select_uncertainty(belief.task_logodds, eligible);
                    break;
                case PolicyKind::GreedyInfoGain:
                    task = select_greedy_ig(belief.task_logodds,
                                            belief.worker_estimate[worker_id], eligible);
                    break;
            }
            const Label vote = generate_label(truths[task], true_skill, rng);
            if (!store.insert(task, worker_id, vote)) {
                throw std::logic_error("worker-task pair repeated despite eligibility filter");
            }
            done[task] = 1;
            counts[task]++;
            ++labels;

            // One online mean-field iteration: the labeled task's posterior
            // from current skills, then this worker's skill estimate.
            belief.task_posterior[task] =
                e_step_task(store, belief.worker_estimate, task);
            belief.worker_estimate[worker_id] =
                m_step_worker(store, belief.task_posterior, prior, worker_id);
            const double mu = belief.task_posterior[task];
            belief.task_logodds[task] =
                std::clamp(logit(mu), -kLogOddsClamp, kLogOddsClamp);
        }
        ++worker_id;
    }

    std::vector<Label> predictions;
    predictions.reserve(m);
    for (int i = 0; i < m; ++i) {
        predictions.push_back(Label::from_sign(belief.task_posterior[i] - 0.5, rng));
    }
    return score(truths, counts, belief.task_logodds, predictions, labels, unassignable);
}

}  // namespace

RunResult run_once(const ExperimentConfig& cfg, int replication_index) {
    cfg.validate();
    Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(replication_index));
    if (const auto* inf = std::get_if<InferenceMode>(&cfg.mode)) {
        return run_inference(cfg, *inf, rng);
    }
    return run_oracle(cfg, rng);
}

ReplicationStats aggregate_stats(const std::vector<double>& accuracies) {
    const int n = static_cast<int>(accuracies.size());
    if (n < 2) throw ConfigError("standard error needs at least 2 replications");
    double mean = 0.0;
    for (double a : accuracies) mean += a;
    mean /= n;
    double ss = 0.0;
    for (double a : accuracies) ss += (a - mean) * (a - mean);
    const double sd = std::sqrt(ss / (n - 1));
    return ReplicationStats{mean, sd / std::sqrt(static_cast<double>(n)), n};
}

ReplicationStats run_experiment(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    if (cfg.replications < 2) {
        throw ConfigError("standard error needs at least 2 replications");
    }
    const int n = cfg.replications;
    std::vector<double> accuracies(n, 0.0);

    const int workers = std::clamp(jobs, 1, n);
    if (workers == 1) {
        for (int r = 0; r < n; ++r) accuracies[r] = run_once(cfg, r).accuracy;
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < n; r = next.fetch_add(1)) {
                    accuracies[r] = run_once(cfg, r).accuracy;
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return aggregate_stats(accuracies);
}

const char* sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Tasks: return "tasks";
        case SweepAxis::BudgetRatio: return "budget_ratio";
        case SweepAxis::LabelsPerWorker: return "labels_per_worker";
    }
    return "?";
}

std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            const std::vector<double>& points,
                            const std::vector<PolicyKind>& policies, int jobs) {
    if (points.empty()) throw ConfigError("sweep needs at least one point");
    const double base_ratio =
        static_cast<double>(base.budget) / static_cast<double>(base.num_tasks);

    std::vector<SweepRow> rows;
    for (double point : points) {
        SweepRow row{point, {}};
        for (PolicyKind policy : policies) {
            ExperimentConfig cfg = base;
            cfg.policy = policy;
            switch (axis) {
                case SweepAxis::Tasks:
                    cfg.num_tasks = static_cast<int>(std::lround(point));
                    cfg.budget = std::lround(base_ratio * point);
                    break;
                case SweepAxis::BudgetRatio:
                    cfg.budget = std::lround(point * cfg.num_tasks);
                    break;
                case SweepAxis::LabelsPerWorker:
                    cfg.labels_per_worker = static_cast<int>(std::lround(point));
                    break;
            }
            SweepCell cell{policy, {0.0, 0.0, 0}, ""};
            try {
                cell.stats = run_experiment(cfg, jobs);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            row.cells.push_back(std::move(cell));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace crowd
