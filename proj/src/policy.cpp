#include "crowd/policy.hpp"

#include <algorithm>
#include <cmath>

namespace crowd {

double info_gain(double z, double x) {
    // x*sigmoid(z+x) + log((1+e^z)/(1+e^{z+x})), written with softplus so
    // large |z| or |x| cannot overflow. Exact KL is nonnegative; rounding
    // of the cancellation can land a hair below zero, which is clamped.
    const double value = x * sigmoid(z + x) + softplus(z) - softplus(z + x);
    return std::max(value, 0.0);
}

double expected_info_gain(double z, double skill) {
    if (!(skill > 0.0) || !(skill < 1.0)) {
        throw ConfigError("expected_info_gain requires skill strictly inside (0,1)");
    }
    const double w = logit(skill);
    const double q = sigmoid(z);  // current posterior P(l* = +1)
    const double p_plus = q * skill + (1.0 - q) * (1.0 - skill);  // P(vote = +1)
    return p_plus * info_gain(z, w) + (1.0 - p_plus) * info_gain(z, -w);
}

namespace {

template <typename Score>
int argbest(std::span<const int> eligible, Score score, bool minimize) {
    if (eligible.empty()) {
        throw AllocationError("no eligible task for this worker");
    }
    int best = eligible.front();
    double best_score = score(best);
    for (std::size_t k = 1; k < eligible.size(); ++k) {
        const int task = eligible[k];
        const double s = score(task);
        const bool better = minimize ? (s < best_score) : (s > best_score);
        if (better || (s == best_score && task < best)) {
            best = task;
            best_score = s;
        }
    }
    return best;
}

}  // namespace

int select_uncertainty(std::span<const double> logodds, std::span<const int> eligible) {
    return argbest(eligible, [&](int i) { return std::abs(logodds[i]); }, true);
}

int select_greedy_ig(std::span<const double> logodds, double skill,
                     std::span<const int> eligible) {
    if (!(skill > 0.0) || !(skill < 1.0)) {
        throw ConfigError("select_greedy_ig requires skill strictly inside (0,1)");
    }
    return argbest(eligible, [&](int i) { return expected_info_gain(logodds[i], skill); },
                   false);
}

int select_uniform(std::span<const int> label_counts, std::span<const int> eligible) {
    return argbest(eligible, [&](int i) { return static_cast<double>(label_counts[i]); },
                   true);
}

}  // namespace crowd
