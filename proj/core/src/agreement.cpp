#include "swelabel/agreement.hpp"

#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "swelabel/consensus.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::agreement {

namespace {

// Squared difference between categories c and k under the chosen metric.
// Ordinal uses the cumulative-marginal form over the coincidence totals n_g.
double delta_sq(Metric metric, int c, int k, const std::map<int, double>& n_totals) {
    if (c == k) return 0.0;
    switch (metric) {
        case Metric::Nominal:
            return 1.0;
        case Metric::Interval: {
            double d = static_cast<double>(c - k);
            return d * d;
        }
        case Metric::Ordinal: {
            int lo = std::min(c, k), hi = std::max(c, k);
            double sum = 0.0;
            for (const auto& [cat, n] : n_totals) {
                if (cat >= lo && cat <= hi) sum += n;
            }
            sum -= (n_totals.at(lo) + n_totals.at(hi)) / 2.0;
            return sum * sum;
        }
    }
    return 0.0;
}

}  // namespace

Metric metric_from_string(const std::string& name) {
    if (name == "nominal") return Metric::Nominal;
    if (name == "ordinal") return Metric::Ordinal;
    if (name == "interval") return Metric::Interval;
    throw Error(ErrorKind::ConfigError, "unknown metric: " + name);
}

const char* to_string(Band band) {
    switch (band) {
        case Band::Poor: return "poor";
        case Band::Moderate: return "moderate";
        case Band::Substantial: return "substantial";
    }
    return "?";
}

double alpha(const ReliabilityMatrix& matrix) {
    // Coincidence matrix: each ordered pair of values within a unit with
    // m values contributes 1/(m-1).
    std::map<std::pair<int, int>, double> coincidences;
    std::map<int, double> n_totals;
    double n = 0.0;

    for (const auto& row : matrix.values) {
        std::vector<int> vals;
        for (const auto& cell : row) {
            if (cell) vals.push_back(*cell);
        }
        const std::size_t m = vals.size();
        if (m < 2) continue;
        const double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                coincidences[{vals[i], vals[j]}] += w;
            }
            n_totals[vals[i]] += 1.0;
            n += 1.0;
        }
    }

    if (n < 2.0) throw Error(ErrorKind::UndefinedAlpha, "no unit has two or more values");

    double observed = 0.0;
    for (const auto& [pair, count] : coincidences)
        observed += count * delta_sq(matrix.metric, pair.first, pair.second, n_totals);

    double expected = 0.0;
    for (const auto& [c, nc] : n_totals) {
        for (const auto& [k, nk] : n_totals) {
            if (c == k) continue;
            expected += nc * nk * delta_sq(matrix.metric, c, k, n_totals);
        }
    }

    if (expected == 0.0) return 1.0;  // zero-variance convention
    return 1.0 - (n - 1.0) * observed / expected;
}

Band classify_alpha(double value) {
    if (value < 0.66) return Band::Poor;
    if (value < 0.80) return Band::Moderate;
    return Band::Substantial;
}

AgreementReport report(const ReliabilityMatrix& matrix) {
    AgreementReport rep;
    rep.alpha = alpha(matrix);
    rep.band = classify_alpha(rep.alpha);
    long pairable = 0;
    for (const auto& row : matrix.values) {
        long m = 0;
        for (const auto& cell : row)
            if (cell) ++m;
        if (m >= 2) pairable += m;
    }
    rep.n_pairable_values = pairable;
    return rep;
}

AgreementReport run_agreement(const std::vector<LabelRecord>& records) {
    if (records.empty()) throw Error(ErrorKind::UndefinedAlpha, "no records");
    ReliabilityMatrix matrix;
    matrix.metric = Metric::Nominal;
    std::size_t run_count = records.front().runs.size();
    for (const auto& rec : records) {
        if (rec.runs.size() != run_count)
            throw Error(ErrorKind::ConfigError, "records have unequal run counts");
    }
    for (std::size_t r = 0; r < run_count; ++r) matrix.raters.push_back("run" + std::to_string(r));
    for (const auto& rec : records) {
        matrix.units.push_back(rec.instance_id);
        std::vector<std::optional<int>> row(run_count);
        for (const auto& run : rec.runs) {
            if (!run.score) continue;  // flagged runs are missing data
            const int code = consensus::discretize(*run.score) == BinaryLabel::Positive ? 0 : 1;
            row[static_cast<std::size_t>(run.run_index)] = code;
        }
        matrix.values.push_back(std::move(row));
    }
    return report(matrix);
}

ReliabilityMatrix load_matrix(const std::filesystem::path& path, Metric metric) {
    ReliabilityMatrix matrix;
    matrix.metric = metric;
    std::set<std::string> rater_set;
    std::vector<std::pair<std::string, std::map<std::string, int>>> rows;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("unit") || !j.contains("values"))
            throw errors::malformed_record(line_no, "expected {unit, values}");
        std::map<std::string, int> cells;
        for (const auto& [rater, value] : j["values"].items()) {
            cells[rater] = value.get<int>();
            rater_set.insert(rater);
        }
        rows.emplace_back(j["unit"].get<std::string>(), std::move(cells));
    }
    matrix.raters.assign(rater_set.begin(), rater_set.end());
    for (auto& [unit, cells] : rows) {
        matrix.units.push_back(unit);
        std::vector<std::optional<int>> row(matrix.raters.size());
        for (std::size_t r = 0; r < matrix.raters.size(); ++r) {
            auto it = cells.find(matrix.raters[r]);
            if (it != cells.end()) row[r] = it->second;
        }
        matrix.values.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace swelabel::agreement
