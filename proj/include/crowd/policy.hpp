#pragma once

#include <span>
#include <vector>

#include "crowd/domain.hpp"

namespace crowd {

// One incoming vote as seen by the log-odds walk: a step of magnitude
// w = log(p/(1-p)) whose sign matches the vote.
struct VoteIncrement {
    double magnitude;  // w = |x|
    double signed_value;  // x

    static VoteIncrement from_vote(Label vote, double skill) {
        const double w = logit(skill);
        return VoteIncrement{std::abs(w), vote.value() * w};
    }
};

// KL divergence between the task posterior after and before absorbing a
// vote increment x at current log-odds z.
double info_gain(double z, double x);

// info_gain averaged over the two possible votes of a worker with the
// given skill, using the model's predictive vote distribution at z.
double expected_info_gain(double z, double skill);

// argmin |z_i| over eligible tasks; ties go to the lowest task id.
int select_uncertainty(std::span<const double> logodds, std::span<const int> eligible);

// argmax expected_info_gain(z_i, skill); ties go to the lowest task id.
int select_greedy_ig(std::span<const double> logodds, double skill,
                     std::span<const int> eligible);

// Eligible task with the fewest labels; ties go to the lowest task id.
int select_uniform(std::span<const int> label_counts, std::span<const int> eligible);

}  // namespace crowd
