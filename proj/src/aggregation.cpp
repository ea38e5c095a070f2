#include "crowd/aggregation.hpp"

#include <cmath>

namespace crowd {

double log_odds(const std::vector<std::pair<Label, double>>& labels) {
    double z = 0.0;
    for (const auto& [label, skill] : labels) {
        if (!(skill > 0.0) || !(skill < 1.0)) {
            throw ConfigError("vote weight undefined: skill must lie strictly inside (0,1)");
        }
        z += label.value() * logit(skill);
    }
    return z;
}

Label classify(double z, Rng& tie_rng) {
    return Label::from_sign(z, tie_rng);
}

double confidence(double z) {
    return sigmoid(std::abs(z));
}

Label majority_vote(const std::vector<Label>& labels, Rng& tie_rng) {
    int sum = 0;
    for (const Label& l : labels) sum += l.value();
    return Label::from_sign(static_cast<double>(sum), tie_rng);
}

AggregateResult aggregate(const std::vector<std::pair<Label, double>>& labels, Rng& tie_rng) {
    const double z = log_odds(labels);
    return AggregateResult{z, classify(z, tie_rng), confidence(z)};
}

}  // namespace crowd
