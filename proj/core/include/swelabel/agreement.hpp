#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swelabel/types.hpp"

namespace swelabel::agreement {

enum class Metric { Nominal, Ordinal, Interval };

Metric metric_from_string(const std::string& name);

// units x raters grid of optional category codes; missing entries are
// simply absent. Alpha needs at least one unit with two or more values.
struct ReliabilityMatrix {
    std::vector<std::string> units;
    std::vector<std::string> raters;
    std::vector<std::vector<std::optional<int>>> values;  // [unit][rater]
    Metric metric = Metric::Nominal;
};

enum class Band { Poor, Moderate, Substantial };

const char* to_string(Band band);

struct AgreementReport {
    double alpha = 0.0;
    Band band = Band::Poor;
    long n_pairable_values = 0;
};

// Krippendorff's alpha = 1 - D_o/D_e via the coincidence-matrix
// formulation. Units with fewer than two values are excluded. When the
// data carries no variance at all (every pairable value identical),
// expected disagreement is zero and alpha is 1.0 by convention.
double alpha(const ReliabilityMatrix& matrix);

// Poor < 0.66 <= Moderate < 0.80 <= Substantial.
Band classify_alpha(double value);

// Runs-as-raters agreement over the binary labels of one task's records.
AgreementReport run_agreement(const std::vector<LabelRecord>& records);

AgreementReport report(const ReliabilityMatrix& matrix);

// Unit-per-line JSON records: {"unit": id, "values": {rater: code, ...}}.
ReliabilityMatrix load_matrix(const std::filesystem::path& path, Metric metric);

}  // namespace swelabel::agreement
