#pragma once

#include <utility>
#include <vector>

#include "crowd/domain.hpp"

namespace crowd {

struct AggregateResult {
    double logodds;     // z
    Label predicted;
    double confidence;  // exp(|z|)/(1+exp(|z|)), in [0.5, 1)
};

// Weighted log-odds vote sum: sum of label * log(p/(1-p)) over the input.
// Empty input yields 0. Skills at 0 or 1 are rejected (infinite weight).
double log_odds(const std::vector<std::pair<Label, double>>& labels);

// Sign of z; a tie at z == 0 is resolved by a fair coin from `tie_rng`.
Label classify(double z, Rng& tie_rng);

// exp(|z|)/(1+exp(|z|)), overflow-safe for any |z|.
double confidence(double z);

// Unweighted majority; ties resolved by the same coin rule as classify.
Label majority_vote(const std::vector<Label>& labels, Rng& tie_rng);

AggregateResult aggregate(const std::vector<std::pair<Label, double>>& labels, Rng& tie_rng);

}  // namespace crowd
