#pragma once

#include <vector>

#include "swelabel/types.hpp"

namespace swelabel::consensus {

// Scores 0-1 keep an instance, 2-3 discard it.
IssueLabel discretize_ica(Score score);
TestLabel discretize_tca(Score score);

// Task-agnostic form of the same split: {0,1} -> Positive, {2,3} -> Negative.
BinaryLabel discretize(Score score);

struct ConsensusResult {
    Score consensus_score{0};
    BinaryLabel binary_label = BinaryLabel::Positive;
    double confidence = 0.0;  // fraction of valid runs agreeing with binary_label
    ConsensusRule rule_applied = ConsensusRule::Majority;
    int valid_run_count = 0;
};

// Majority vote over raw 0-3 scores; when no value occurs more than n/2
// times, the median of the sorted scores decides (even counts take the
// upper median). Callers pass only the valid (parsed) run scores.
ConsensusResult aggregate(const std::vector<Score>& valid_scores);

// Verification filter: keep iff ica < 2 and tca < 2.
bool verify(Score ica_consensus, Score tca_consensus);

}  // namespace swelabel::consensus
