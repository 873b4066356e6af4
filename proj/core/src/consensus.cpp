#include "swelabel/consensus.hpp"

#include <algorithm>
#include <array>

namespace swelabel::consensus {

BinaryLabel discretize(Score score) {
    return score.value() <= 1 ? BinaryLabel::Positive : BinaryLabel::Negative;
}

IssueLabel discretize_ica(Score score) {
    return discretize(score) == BinaryLabel::Positive ? IssueLabel::WellSpecified
                                                      : IssueLabel::Underspecified;
}

TestLabel discretize_tca(Score score) {
    return discretize(score) == BinaryLabel::Positive ? TestLabel::Adequate : TestLabel::Inadequate;
}

ConsensusResult aggregate(const std::vector<Score>& valid_scores) {
    if (valid_scores.empty()) throw Error(ErrorKind::NoValidRuns, "no valid run scores to aggregate");

    const int n = static_cast<int>(valid_scores.size());
    std::array<int, 4> counts{};
    for (Score s : valid_scores) counts[static_cast<std::size_t>(s.value())]++;

    ConsensusResult result;
    result.valid_run_count = n;

    int majority_value = -1;
    for (int v = 0; v < 4; ++v) {
        if (counts[static_cast<std::size_t>(v)] * 2 > n) majority_value = v;
    }

    if (majority_value >= 0) {
        result.consensus_score = Score(majority_value);
        result.rule_applied = ConsensusRule::Majority;
    } else {
        std::vector<int> sorted;
        sorted.reserve(valid_scores.size());
        for (Score s : valid_scores) sorted.push_back(s.value());
        std::sort(sorted.begin(), sorted.end());
        // Upper median on even counts: conservative toward exclusion.
        result.consensus_score = Score(sorted[sorted.size() / 2]);
        result.rule_applied = ConsensusRule::Median;
    }

    result.binary_label = discretize(result.consensus_score);
    int agree = 0;
    for (Score s : valid_scores) {
        if (discretize(s) == result.binary_label) ++agree;
    }
    result.confidence = static_cast<double>(agree) / static_cast<double>(n);
    return result;
}

bool verify(Score ica_consensus, Score tca_consensus) {
    return ica_consensus.value() < 2 && tca_consensus.value() < 2;
}

}  // namespace swelabel::consensus
