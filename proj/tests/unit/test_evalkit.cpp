#include <doctest.h>

#include <cmath>

#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "swelabel/evalkit.hpp"

using namespace swelabel;
using namespace swelabel::evalkit;

TEST_CASE("majority_reference takes the 2-of-3 binary majority") {
    CHECK(majority_reference({Score(0), Score(1), Score(3)}) == BinaryLabel::Positive);
    CHECK(majority_reference({Score(2), Score(2), Score(0)}) == BinaryLabel::Negative);
    CHECK(majority_reference({Score(0), Score(0), Score(0)}) == BinaryLabel::Positive);
}

TEST_CASE("accuracy over the key intersection") {
    std::map<std::string, BinaryLabel> pred, ref;
    for (int i = 0; i < 10; ++i) {
        pred["id" + std::to_string(i)] = BinaryLabel::Positive;
        ref["id" + std::to_string(i)] = BinaryLabel::Positive;
    }
    CHECK(accuracy(pred, ref) == doctest::Approx(1.0));

    // 96 of 110 equal: reported as 87.3% at one decimal.
    pred.clear();
    ref.clear();
    for (int i = 0; i < 110; ++i) {
        const auto id = "x" + std::to_string(i);
        pred[id] = BinaryLabel::Positive;
        ref[id] = i < 96 ? BinaryLabel::Positive : BinaryLabel::Negative;
    }
    const double acc = accuracy(pred, ref);
    CHECK(acc == doctest::Approx(96.0 / 110.0));
    CHECK(std::round(acc * 1000.0) / 10.0 == doctest::Approx(87.3));

    std::map<std::string, BinaryLabel> disjoint{{"other", BinaryLabel::Positive}};
    CHECK_THROWS_AS(accuracy(pred, disjoint), Error);
}

TEST_CASE("accuracy is symmetric in its arguments") {
    oracles::Rng rng(5);
    std::map<std::string, BinaryLabel> a, b;
    for (int i = 0; i < 50; ++i) {
        const auto id = "i" + std::to_string(i);
        if (rng.below(4)) a[id] = rng.below(2) ? BinaryLabel::Positive : BinaryLabel::Negative;
        if (rng.below(4)) b[id] = rng.below(2) ? BinaryLabel::Positive : BinaryLabel::Negative;
    }
    CHECK(accuracy(a, b) == doctest::Approx(accuracy(b, a)));
}

TEST_CASE("quota_sample takes min(k, group size) per group") {
    std::map<std::string, std::vector<std::string>> groups;
    groups["flask"] = {"f1"};
    groups["seaborn"] = {"s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9"};
    for (int g = 0; g < 10; ++g) {
        std::vector<std::string> ids;
        for (int i = 0; i < 12 + g; ++i)
            ids.push_back("p" + std::to_string(g) + "-" + std::to_string(i));
        groups["project" + std::to_string(g)] = ids;
    }
    const auto sample = quota_sample(groups, 10, 7);
    CHECK(sample.size() == 110);  // 1 + 9 + 10*10

    const auto again = quota_sample(groups, 10, 7);
    CHECK(sample == again);
    const auto other_seed = quota_sample(groups, 10, 8);
    CHECK(other_seed.size() == 110);
    CHECK(sample != other_seed);  // overwhelmingly likely with 100 drawn ids
}

TEST_CASE("quota_sample with k=1 picks one per group") {
    std::map<std::string, std::vector<std::string>> groups;
    for (int g = 0; g < 5; ++g)
        groups["g" + std::to_string(g)] = {"a" + std::to_string(g), "b" + std::to_string(g)};
    CHECK(quota_sample(groups, 1, 3).size() == 5);
}

TEST_CASE("combine_rationales formats seat headers") {
    CHECK(combine_rationales({"a", "b", "c"}) == "L1:\na\n\nL2:\nb\n\nL3:\nc");
    CHECK(combine_rationales({"only"}) == "L1:\nonly");
    CHECK(combine_rationales({"", "mid", ""}) == "L2:\nmid");
    CHECK_THROWS_AS(combine_rationales({"", ""}), Error);
}

TEST_CASE("cosine similarity closed forms") {
    EmbeddingVector u{{1, 1}, "m"}, v{{1, 0}, "m"};
    CHECK(cosine(u, u) == doctest::Approx(1.0));
    CHECK(std::fabs(cosine(u, v) - 1.0 / std::sqrt(2.0)) < 1e-9);
    EmbeddingVector e1{{1, 0}, "m"}, e2{{0, 1}, "m"};
    CHECK(cosine(e1, e2) == doctest::Approx(0.0));
    EmbeddingVector zero{{0, 0}, "m"}, wrong{{1, 2, 3}, "m"};
    CHECK_THROWS_AS(cosine(u, zero), Error);
    CHECK_THROWS_AS(cosine(u, wrong), Error);
}

TEST_CASE("word_count counts maximal whitespace-separated tokens") {
    CHECK(word_count("") == 0);
    CHECK(word_count("a  b\nc") == 3);
    std::string text;
    for (int i = 0; i < 67; ++i) text += "word" + std::to_string(i) + (i % 9 == 0 ? "\n" : " ");
    CHECK(word_count(text) == 67);
}

TEST_CASE("resolution_rates") {
    testsupport::TempDir tmp("scaffolds");
    for (int s = 0; s < 25; ++s) {
        nlohmann::json results;
        // "hot" resolved by 11 scaffolds, "cold" by none, "warm" by all.
        nlohmann::json resolved = nlohmann::json::array();
        if (s < 11) resolved.push_back("hot");
        resolved.push_back("warm");
        results["resolved"] = resolved;
        testsupport::write(tmp.path() / ("scaffold" + std::to_string(s)) / "results" /
                               "results.json",
                           results.dump());
    }
    std::vector<std::filesystem::path> dirs;
    for (int s = 0; s < 25; ++s) dirs.push_back(tmp.path() / ("scaffold" + std::to_string(s)));

    const auto rates = resolution_rates(dirs, {"hot", "cold", "warm"});
    REQUIRE(rates.size() == 3);
    CHECK(rates[0].rate == doctest::Approx(0.44));
    CHECK(rates[0].resolved_count == 11);
    CHECK(rates[1].rate == doctest::Approx(0.0));
    CHECK(rates[2].rate == doctest::Approx(1.0));

    // Conservation: total resolved hits equal the per-scaffold list sizes
    // restricted to the queried ids.
    long total = 0;
    for (const auto& r : rates) total += r.resolved_count;
    CHECK(total == 11 + 0 + 25);

    dirs.push_back(tmp.path() / "missing");
    CHECK_THROWS_AS(resolution_rates(dirs, {"hot"}), Error);
}

TEST_CASE("anova: hand-derived fixture F = 13.5 with df (1, 4)") {
    const auto r = anova_oneway({{1, 2, 3}, {4, 5, 6}});
    // SSB = 3*(2-3.5)^2 + 3*(5-3.5)^2 = 13.5; SSW = 4; MSW = 1.
    CHECK(r.f_stat == doctest::Approx(13.5).epsilon(1e-12));
    CHECK(r.df_between == 1);
    CHECK(r.df_within == 4);
    CHECK(r.group_medians[0] == doctest::Approx(2.0));
    CHECK(r.group_medians[1] == doctest::Approx(5.0));
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value < 0.05);
}

TEST_CASE("anova: equal groups give F ~ 0, p ~ 1") {
    const auto r = anova_oneway({{1, 2, 3}, {1, 2, 3}});
    CHECK(r.f_stat == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("anova: degenerate input") {
    CHECK_THROWS_AS(anova_oneway({{1, 2, 3}}), Error);
    CHECK_THROWS_AS(anova_oneway({{1}, {2, 3}}), Error);
    CHECK_THROWS_AS(anova_oneway({{2, 2}, {2, 2}}), Error);  // no within-group variance
}

TEST_CASE("anova F and p match the quadrature oracle on random groups") {
    oracles::Rng rng(314159);
    int checked = 0;
    while (checked < 100) {
        const int k = 2 + rng.below(3);
        std::vector<std::vector<double>> groups;
        for (int g = 0; g < k; ++g) {
            const int size = 2 + rng.below(6);
            std::vector<double> values;
            for (int i = 0; i < size; ++i)
                values.push_back(rng.uniform() * 4.0 + g * rng.uniform());
            groups.push_back(std::move(values));
        }
        AnovaResult r;
        try {
            r = anova_oneway(groups);
        } catch (const Error&) {
            continue;
        }
        const double p_oracle = oracles::f_upper_tail_quadrature(
            r.f_stat, static_cast<double>(r.df_between), static_cast<double>(r.df_within));
        CHECK(std::fabs(r.p_value - p_oracle) < 1e-6);
        ++checked;
    }
}

TEST_CASE("anova invariances: group order, shift, scale") {
    const std::vector<std::vector<double>> groups = {{1.2, 3.1, 0.4}, {5.0, 4.2, 4.9}, {2.2, 2.9}};
    const auto base = anova_oneway(groups);

    const auto reordered = anova_oneway({groups[2], groups[0], groups[1]});
    CHECK(reordered.f_stat == doctest::Approx(base.f_stat));

    auto shifted = groups;
    for (auto& g : shifted)
        for (auto& v : g) v += 100.0;
    CHECK(anova_oneway(shifted).f_stat == doctest::Approx(base.f_stat));

    auto scaled = groups;
    for (auto& g : scaled)
        for (auto& v : g) v *= -3.5;
    CHECK(anova_oneway(scaled).f_stat == doctest::Approx(base.f_stat));
}

TEST_CASE("anova p decreases as F increases for fixed dfs") {
    double prev = 1.0;
    for (double f = 0.5; f < 20.0; f += 0.5) {
        const double p = reg_inc_beta(2.0, 1.0, 4.0 / (4.0 + 2.0 * f));
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("reg_inc_beta closed forms") {
    for (double x : {0.0, 0.25, 1.0})
        CHECK(std::fabs(reg_inc_beta(1.0, 1.0, x) - x) < 1e-12);
    // I_x(1, b) = 1 - (1-x)^b
    CHECK(std::fabs(reg_inc_beta(1.0, 3.0, 0.5) - 0.875) < 1e-12);
    for (double b : {0.5, 2.0, 7.5})
        for (double x : {0.1, 0.5, 0.9})
            CHECK(std::fabs(reg_inc_beta(1.0, b, x) - (1.0 - std::pow(1.0 - x, b))) < 1e-12);
}

TEST_CASE("reg_inc_beta boundaries, monotonicity, domain") {
    CHECK(reg_inc_beta(2.5, 3.5, 0.0) == 0.0);
    CHECK(reg_inc_beta(2.5, 3.5, 1.0) == 1.0);
    double prev = -1.0;
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        const double v = reg_inc_beta(1.7, 2.9, x);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(reg_inc_beta(0.0, 1.0, 0.5), Error);
    CHECK_THROWS_AS(reg_inc_beta(1.0, -2.0, 0.5), Error);
    CHECK_THROWS_AS(reg_inc_beta(1.0, 1.0, 1.5), Error);
}

TEST_CASE("reg_inc_beta matches the quadrature oracle") {
    oracles::Rng rng(2718281);
    for (int trial = 0; trial < 60; ++trial) {
        const double a = 0.6 + rng.uniform() * 7.0;
        const double b = 0.6 + rng.uniform() * 7.0;
        const double x = 0.02 + rng.uniform() * 0.96;
        const double expected = oracles::inc_beta_quadrature(a, b, x);
        CHECK(std::fabs(reg_inc_beta(a, b, x) - expected) < 1e-10);
    }
}
