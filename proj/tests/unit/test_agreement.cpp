#include <doctest.h>

#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "swelabel/agreement.hpp"

using namespace swelabel;
using namespace swelabel::agreement;

namespace {

ReliabilityMatrix matrix_of(std::vector<std::vector<std::optional<int>>> grid, Metric metric) {
    ReliabilityMatrix m;
    m.metric = metric;
    m.values = std::move(grid);
    for (std::size_t u = 0; u < m.values.size(); ++u) m.units.push_back("u" + std::to_string(u));
    const std::size_t raters = m.values.empty() ? 0 : m.values.front().size();
    for (std::size_t r = 0; r < raters; ++r) m.raters.push_back("r" + std::to_string(r));
    return m;
}

oracles::Metric to_oracle(Metric m) {
    switch (m) {
        case Metric::Nominal: return oracles::Metric::Nominal;
        case Metric::Ordinal: return oracles::Metric::Ordinal;
        case Metric::Interval: return oracles::Metric::Interval;
    }
    return oracles::Metric::Nominal;
}

}  // namespace

TEST_CASE("unanimous data scores 1.0 by convention") {
    const auto m = matrix_of({{0, 0, 0}, {0, 0, 0}}, Metric::Nominal);
    CHECK(alpha(m) == doctest::Approx(1.0));
}

TEST_CASE("systematic disagreement goes negative") {
    const auto m = matrix_of({{0, 1}, {1, 0}}, Metric::Nominal);
    CHECK(alpha(m) < 0.0);
}

TEST_CASE("units with fewer than two values are excluded") {
    const auto with_gap =
        matrix_of({{0, 0, std::nullopt}, {1, std::nullopt, std::nullopt}, {0, 1, 1}}, Metric::Nominal);
    const auto without =
        matrix_of({{0, 0, std::nullopt}, {0, 1, 1}}, Metric::Nominal);
    CHECK(alpha(with_gap) == doctest::Approx(alpha(without)));
}

TEST_CASE("alpha undefined when no unit is pairable") {
    const auto m = matrix_of({{0, std::nullopt}, {std::nullopt, 1}}, Metric::Nominal);
    CHECK_THROWS_AS(alpha(m), Error);
}

TEST_CASE("alpha matches the brute-force pair enumeration oracle") {
    oracles::Rng rng(20240817);
    for (Metric metric : {Metric::Nominal, Metric::Ordinal, Metric::Interval}) {
        for (int trial = 0; trial < 200; ++trial) {
            const int raters = 2 + rng.below(4);   // 2..5
            const int units = 4 + rng.below(7);    // 4..10
            std::vector<std::vector<std::optional<int>>> grid(
                static_cast<std::size_t>(units),
                std::vector<std::optional<int>>(static_cast<std::size_t>(raters)));
            int pairable_units = 0;
            for (auto& row : grid) {
                int filled = 0;
                for (auto& cell : row) {
                    if (rng.below(100) < 75) {
                        cell = rng.below(4);
                        ++filled;
                    }
                }
                if (filled >= 2) ++pairable_units;
            }
            if (pairable_units == 0) continue;
            const auto m = matrix_of(grid, metric);
            double expected;
            try {
                expected = oracles::alpha_bruteforce(grid, to_oracle(metric));
            } catch (const std::runtime_error&) {
                continue;
            }
            CHECK(std::fabs(alpha(m) - expected) < 1e-9);
        }
    }
}

TEST_CASE("alpha is invariant to rater and unit permutation and to relabeling") {
    oracles::Rng rng(99);
    std::vector<std::vector<std::optional<int>>> grid(
        8, std::vector<std::optional<int>>(4));
    for (auto& row : grid)
        for (auto& cell : row)
            if (rng.below(10) < 8) cell = rng.below(3);
    const double base = alpha(matrix_of(grid, Metric::Nominal));

    auto permuted = grid;
    std::swap(permuted[0], permuted[5]);
    for (auto& row : permuted) std::swap(row[1], row[3]);
    CHECK(alpha(matrix_of(permuted, Metric::Nominal)) == doctest::Approx(base));

    auto relabeled = grid;  // bijection 0->7, 1->5, 2->9
    const int map[3] = {7, 5, 9};
    for (auto& row : relabeled)
        for (auto& cell : row)
            if (cell) cell = map[*cell];
    CHECK(alpha(matrix_of(relabeled, Metric::Nominal)) == doctest::Approx(base));
}

TEST_CASE("band thresholds sit at 0.66 and 0.80") {
    CHECK(classify_alpha(0.41) == Band::Poor);
    CHECK(classify_alpha(0.66) == Band::Moderate);
    CHECK(classify_alpha(0.80) == Band::Substantial);
    CHECK(classify_alpha(0.6599) == Band::Poor);
    CHECK(classify_alpha(0.7999) == Band::Moderate);
    CHECK(classify_alpha(1.0) == Band::Substantial);
    CHECK(classify_alpha(-0.5) == Band::Poor);
}

namespace {

LabelRecord record_with_scores(const std::string& id, const std::vector<std::optional<int>>& scores) {
    LabelRecord rec;
    rec.instance_id = id;
    rec.task = Task::Tca;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        RunResult run;
        run.run_index = static_cast<int>(i);
        run.task = Task::Tca;
        if (scores[i]) run.score = Score(*scores[i]);
        rec.runs.push_back(run);
    }
    return rec;
}

}  // namespace

TEST_CASE("run_agreement: unanimous records give alpha 1.0, substantial") {
    std::vector<LabelRecord> records;
    records.push_back(record_with_scores("a", {0, 1, 0}));  // all positive
    records.push_back(record_with_scores("b", {2, 3, 2}));  // all negative
    records.push_back(record_with_scores("c", {1, 1, 1}));
    const auto rep = run_agreement(records);
    CHECK(rep.alpha == doctest::Approx(1.0));
    CHECK(rep.band == Band::Substantial);
    CHECK(rep.n_pairable_values == 9);
}

TEST_CASE("run_agreement: anti-systematic records go negative") {
    std::vector<LabelRecord> records;
    records.push_back(record_with_scores("a", {0, 3, std::nullopt}));
    records.push_back(record_with_scores("b", {3, 0, std::nullopt}));
    records.push_back(record_with_scores("c", {0, 3, std::nullopt}));
    records.push_back(record_with_scores("d", {3, 0, std::nullopt}));
    const auto rep = run_agreement(records);
    CHECK(rep.alpha < 0.0);
    CHECK(rep.band == Band::Poor);
}

TEST_CASE("run_agreement matches a direct matrix with flagged runs as gaps") {
    std::vector<LabelRecord> records;
    records.push_back(record_with_scores("a", {0, 2, 1}));
    records.push_back(record_with_scores("b", {std::nullopt, 2, 3}));
    records.push_back(record_with_scores("c", {1, 1, 2}));
    const auto rep = run_agreement(records);

    // Same data as binary codes, through the matrix route.
    const auto m = matrix_of(
        {{0, 1, 0}, {std::nullopt, 1, 1}, {0, 0, 1}}, Metric::Nominal);
    CHECK(rep.alpha == doctest::Approx(alpha(m)).epsilon(1e-12));
}

TEST_CASE("matrix file loading") {
    testsupport::TempDir tmp("matrix");
    testsupport::write(tmp.path() / "m.jsonl",
                       R"({"unit":"u1","values":{"r1":0,"r2":0}})" "\n"
                       R"({"unit":"u2","values":{"r1":1,"r3":1}})" "\n");
    const auto m = load_matrix(tmp.path() / "m.jsonl", Metric::Nominal);
    CHECK(m.units.size() == 2);
    CHECK(m.raters.size() == 3);
    CHECK(alpha(m) == doctest::Approx(1.0));
}
