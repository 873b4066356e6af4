#include <doctest.h>

#include <algorithm>

#include "support/oracles.hpp"
#include "swelabel/consensus.hpp"

using namespace swelabel;
using namespace swelabel::consensus;

TEST_CASE("discretization follows the 0-1 / 2-3 split") {
    CHECK(discretize_ica(Score(1)) == IssueLabel::WellSpecified);
    CHECK(discretize_ica(Score(2)) == IssueLabel::Underspecified);
    CHECK(discretize_ica(Score(0)) == IssueLabel::WellSpecified);
    CHECK(discretize_ica(Score(3)) == IssueLabel::Underspecified);

    CHECK(discretize_tca(Score(1)) == TestLabel::Adequate);
    CHECK(discretize_tca(Score(3)) == TestLabel::Inadequate);
    CHECK(discretize_tca(Score(2)) == TestLabel::Inadequate);
    CHECK(discretize_tca(Score(0)) == TestLabel::Adequate);
}

TEST_CASE("score range is enforced") {
    CHECK_THROWS_AS(Score(4), Error);
    CHECK_THROWS_AS(Score(-1), Error);
}

TEST_CASE("aggregate: majority") {
    const auto r = aggregate({Score(0), Score(0), Score(2)});
    CHECK(r.consensus_score.value() == 0);
    CHECK(r.rule_applied == ConsensusRule::Majority);
    CHECK(r.binary_label == BinaryLabel::Positive);
    CHECK(r.confidence == doctest::Approx(2.0 / 3.0));
    CHECK(r.valid_run_count == 3);
}

TEST_CASE("aggregate: no majority falls back to the median") {
    const auto r = aggregate({Score(0), Score(2), Score(3)});
    CHECK(r.consensus_score.value() == 2);
    CHECK(r.rule_applied == ConsensusRule::Median);
}

TEST_CASE("aggregate: even count takes the upper median") {
    const auto r = aggregate({Score(1), Score(3)});
    CHECK(r.consensus_score.value() == 3);
    CHECK(r.rule_applied == ConsensusRule::Median);
    CHECK(r.valid_run_count == 2);
    CHECK(r.confidence == doctest::Approx(0.5));
}

TEST_CASE("aggregate: no valid runs") {
    CHECK_THROWS_AS(aggregate({}), Error);
    try {
        aggregate({});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoValidRuns);
    }
}

TEST_CASE("triple identity: consensus equals the sorted-triple median, exhaustively") {
    for (int a = 0; a <= 3; ++a) {
        for (int b = 0; b <= 3; ++b) {
            for (int c = 0; c <= 3; ++c) {
                std::vector<int> sorted = {a, b, c};
                std::sort(sorted.begin(), sorted.end());
                const int median = sorted[1];
                const auto r = aggregate({Score(a), Score(b), Score(c)});
                CHECK(r.consensus_score.value() == median);
                // When two agree, the majority value is exactly the median.
                if (a == b || b == c || a == c)
                    CHECK(r.rule_applied == ConsensusRule::Majority);
                // Discretize-commute invariant.
                CHECK(r.binary_label == discretize(r.consensus_score));
            }
        }
    }
}

TEST_CASE("aggregate is invariant to permutation") {
    oracles::Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + rng.below(6);
        std::vector<Score> scores;
        for (int i = 0; i < n; ++i) scores.emplace_back(rng.below(4));
        const auto base = aggregate(scores);
        for (int shuffle = 0; shuffle < 4; ++shuffle) {
            for (std::size_t i = scores.size() - 1; i > 0; --i)
                std::swap(scores[i], scores[static_cast<std::size_t>(rng.below(static_cast<int>(i) + 1))]);
            const auto r = aggregate(scores);
            CHECK(r.consensus_score == base.consensus_score);
            CHECK(r.confidence == doctest::Approx(base.confidence));
            CHECK(r.rule_applied == base.rule_applied);
        }
    }
}

TEST_CASE("confidence is 1 iff all valid runs share the binary label") {
    oracles::Rng rng(4242);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + rng.below(5);
        std::vector<Score> scores;
        for (int i = 0; i < n; ++i) scores.emplace_back(rng.below(4));
        const auto r = aggregate(scores);
        CHECK(r.confidence > 0.0);
        CHECK(r.confidence <= 1.0);
        const bool unanimous = std::all_of(scores.begin(), scores.end(), [&](Score s) {
            return discretize(s) == discretize(scores.front());
        });
        CHECK((r.confidence == 1.0) == unanimous);
    }
}

TEST_CASE("verify keeps exactly the pairs below 2 on both axes") {
    CHECK(verify(Score(1), Score(1)));
    CHECK_FALSE(verify(Score(0), Score(2)));
    int kept = 0;
    for (int ica = 0; ica <= 3; ++ica)
        for (int tca = 0; tca <= 3; ++tca)
            if (verify(Score(ica), Score(tca))) ++kept;
    CHECK(kept == 4);
}
