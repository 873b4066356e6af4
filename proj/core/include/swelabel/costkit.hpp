#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swelabel::costkit {

// Currency per 1M tokens.
struct PricingRate {
    std::string model_id;
    double input_rate = 0.0;
    double output_rate = 0.0;
};

// Recorded per-task split of a historical end-to-end projection; carried by
// a pricing profile so reports can restate the headline figure.
struct CostSplit {
    double issues = 0.0;
    double tests = 0.0;
};

struct PricingProfile {
    std::string name;
    std::vector<PricingRate> rates;
    std::optional<CostSplit> default_split;
};

struct CostRow {
    std::string model_id;
    double input_cost = 0.0;   // exact, pre-rounding
    double output_cost = 0.0;  // exact, pre-rounding
    double total = 0.0;        // input + output, exact
};

struct CostTable {
    long n_instances = 0;
    double input_tokens_per_instance = 0.0;
    double output_tokens_per_instance = 0.0;
    std::vector<CostRow> rows;
    std::optional<CostSplit> default_split;
};

// Half-up rounding to cents for display.
double round_cents(double value);

CostRow project_cost(double input_tokens_per_instance, double output_tokens_per_instance,
                     const PricingRate& rate, long n_instances);

// One row per requested model (profile order when models is empty).
CostTable build_cost_table(double input_tokens_per_instance, double output_tokens_per_instance,
                           const PricingProfile& profile, long n_instances,
                           const std::vector<std::string>& models = {});

std::string render_cost_table(const CostTable& table);

// The historical snapshot used for the 1K-instance projection; rates are
// back-solved so that the combined medians (9,486 in / 4,700 out) reproduce
// the published row costs.
PricingProfile table2_profile();

// JSON file: {"name":..., "rates":[{"model_id","input_per_million",
// "output_per_million"},...], "default_split":{"issues","tests"}?}
PricingProfile load_pricing(const std::filesystem::path& path);

// Named built-in profile or a path to a pricing file.
PricingProfile resolve_pricing(const std::string& name_or_path);

}  // namespace swelabel::costkit
