#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swelabel/types.hpp"

namespace swelabel::evalkit {

// Reference label from three human ordinal scores: discretize each, then
// take the 2-of-3 binary majority.
BinaryLabel majority_reference(const std::array<Score, 3>& human_scores);

// Fraction of agreeing labels over the key intersection.
double accuracy(const std::map<std::string, BinaryLabel>& predicted,
                const std::map<std::string, BinaryLabel>& reference);

// Quota sampling: up to k ids per group, all of them when the group is
// smaller. Seeded and byte-reproducible (hand-rolled Fisher-Yates, no
// implementation-defined std distributions).
std::vector<std::string> quota_sample(const std::map<std::string, std::vector<std::string>>& groups,
                                      std::size_t k, std::uint64_t seed);

// Concatenates rationales in seat order with "L<i>:" headers and blank-line
// separators; empty seats are skipped but keep their numbering.
std::string combine_rationales(const std::vector<std::string>& texts);

double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

// Maximal whitespace-separated tokens.
long word_count(const std::string& text);

struct ResolutionRate {
    std::string instance_id;
    int resolved_count = 0;
    int scaffold_count = 0;
    double rate = 0.0;
};

// rate = |scaffolds whose results file lists the id as resolved| / |scaffolds|.
// Each scaffold directory must contain results/results.json with key
// "resolved"; the relative path is overridable.
std::vector<ResolutionRate> resolution_rates(const std::vector<std::filesystem::path>& scaffold_dirs,
                                             const std::vector<std::string>& instance_ids,
                                             const std::string& results_rel_path = "results/results.json");

struct AnovaResult {
    double f_stat = 0.0;
    long df_between = 0;
    long df_within = 0;
    double p_value = 1.0;
    std::vector<double> group_medians;
};

// One-way ANOVA: F = MS_between / MS_within with df (k-1, N-k); upper-tail
// p-value through the regularized incomplete beta function.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

// I_x(a,b) by continued fraction, switching through the symmetry
// I_x(a,b) = 1 - I_{1-x}(b,a) for convergence; absolute error <= 1e-12.
double reg_inc_beta(double a, double b, double x);

}  // namespace swelabel::evalkit
