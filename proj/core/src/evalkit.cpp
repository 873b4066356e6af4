#include "swelabel/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "swelabel/consensus.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::evalkit {

BinaryLabel majority_reference(const std::array<Score, 3>& human_scores) {
    int positive = 0;
    for (const Score& s : human_scores) {
        if (consensus::discretize(s) == BinaryLabel::Positive) ++positive;
    }
    return positive >= 2 ? BinaryLabel::Positive : BinaryLabel::Negative;
}

double accuracy(const std::map<std::string, BinaryLabel>& predicted,
                const std::map<std::string, BinaryLabel>& reference) {
    long total = 0, equal = 0;
    for (const auto& [id, pred] : predicted) {
        auto it = reference.find(id);
        if (it == reference.end()) continue;
        ++total;
        if (pred == it->second) ++equal;
    }
    if (total == 0) throw Error(ErrorKind::EmptyIntersection, "predicted and reference ids are disjoint");
    return static_cast<double>(equal) / static_cast<double>(total);
}

std::vector<std::string> quota_sample(const std::map<std::string, std::vector<std::string>>& groups,
                                      std::size_t k, std::uint64_t seed) {
    std::vector<std::string> out;
    for (const auto& [group, members] : groups) {  // std::map: deterministic group order
        std::vector<std::string> ids = members;
        std::sort(ids.begin(), ids.end());
        if (ids.size() > k) {
            std::uint64_t state = seed ^ util::fnv1a64(group);
            for (std::size_t i = ids.size() - 1; i > 0; --i) {
                std::size_t j = static_cast<std::size_t>(util::splitmix64(state) % (i + 1));
                std::swap(ids[i], ids[j]);
            }
            ids.resize(k);
            std::sort(ids.begin(), ids.end());
        }
        out.insert(out.end(), ids.begin(), ids.end());
    }
    return out;
}

std::string combine_rationales(const std::vector<std::string>& texts) {
    std::string out;
    bool any = false;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (util::trim(texts[i]).empty()) continue;
        if (any) out += "\n\n";
        out += "L" + std::to_string(i + 1) + ":\n" + texts[i];
        any = true;
    }
    if (!any) throw Error(ErrorKind::AllEmpty, "no non-empty rationale to combine");
    return out;
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.values.size() != v.values.size())
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(u.values.size()) + " vs " + std::to_string(v.values.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) throw Error(ErrorKind::ZeroVector, "cosine of zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

long word_count(const std::string& text) {
    long count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::vector<ResolutionRate> resolution_rates(const std::vector<std::filesystem::path>& scaffold_dirs,
                                             const std::vector<std::string>& instance_ids,
                                             const std::string& results_rel_path) {
    std::vector<std::set<std::string>> resolved_sets;
    for (const auto& dir : scaffold_dirs) {
        const auto file = dir / results_rel_path;
        if (!std::filesystem::exists(file))
            throw Error(ErrorKind::MissingResultsFile, dir.string());
        json j = json::parse(util::read_file(file), nullptr, false);
        if (j.is_discarded() || !j.contains("resolved") || !j["resolved"].is_array())
            throw Error(ErrorKind::MissingResultsFile, "no 'resolved' list in " + file.string());
        std::set<std::string> ids;
        for (const auto& id : j["resolved"]) ids.insert(id.get<std::string>());
        resolved_sets.push_back(std::move(ids));
    }
    std::vector<ResolutionRate> out;
    for (const auto& id : instance_ids) {
        ResolutionRate r;
        r.instance_id = id;
        r.scaffold_count = static_cast<int>(resolved_sets.size());
        for (const auto& s : resolved_sets) {
            if (s.count(id)) ++r.resolved_count;
        }
        r.rate = r.scaffold_count == 0
                     ? 0.0
                     : static_cast<double>(r.resolved_count) / static_cast<double>(r.scaffold_count);
        out.push_back(std::move(r));
    }
    return out;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw Error(ErrorKind::DegenerateGroups, "need at least two groups");
    long total_n = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw Error(ErrorKind::DegenerateGroups, "each group needs >= 2 values");
        total_n += static_cast<long>(g.size());
    }

    double grand_sum = 0.0;
    for (const auto& g : groups)
        for (double v : g) grand_sum += v;
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        const double d = mean - grand_mean;
        ss_between += static_cast<double>(g.size()) * d * d;
        for (double v : g) ss_within += (v - mean) * (v - mean);
    }

    if (ss_within <= 0.0)
        throw Error(ErrorKind::DegenerateGroups, "no within-group variance");

    AnovaResult result;
    result.df_between = static_cast<long>(groups.size()) - 1;
    result.df_within = total_n - static_cast<long>(groups.size());
    const double ms_between = ss_between / static_cast<double>(result.df_between);
    const double ms_within = ss_within / static_cast<double>(result.df_within);
    result.f_stat = ms_between / ms_within;

    // Upper tail of the F distribution via the incomplete beta symmetry.
    const double d1 = static_cast<double>(result.df_between);
    const double d2 = static_cast<double>(result.df_within);
    result.p_value = reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * result.f_stat));

    for (const auto& g : groups) {
        std::vector<double> copy = g;
        result.group_medians.push_back(util::median(std::move(copy)));
    }
    return result;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw Error(ErrorKind::ConvergenceFailure, "incomplete beta continued fraction");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw Error(ErrorKind::DomainError, "reg_inc_beta requires a > 0 and b > 0");
    if (!(x >= 0.0) || !(x <= 1.0))
        throw Error(ErrorKind::DomainError, "reg_inc_beta requires x in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace swelabel::evalkit
