#include "swelabel/costkit.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swelabel/errors.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::costkit {

double round_cents(double value) {
    return std::floor(value * 100.0 + 0.5) / 100.0;
}

CostRow project_cost(double input_tokens_per_instance, double output_tokens_per_instance,
                     const PricingRate& rate, long n_instances) {
    CostRow row;
    row.model_id = rate.model_id;
    const double n = static_cast<double>(n_instances);
    row.input_cost = n * input_tokens_per_instance * rate.input_rate / 1e6;
    row.output_cost = n * output_tokens_per_instance * rate.output_rate / 1e6;
    row.total = row.input_cost + row.output_cost;
    return row;
}

CostTable build_cost_table(double input_tokens_per_instance, double output_tokens_per_instance,
                           const PricingProfile& profile, long n_instances,
                           const std::vector<std::string>& models) {
    CostTable table;
    table.n_instances = n_instances;
    table.input_tokens_per_instance = input_tokens_per_instance;
    table.output_tokens_per_instance = output_tokens_per_instance;
    table.default_split = profile.default_split;

    auto find_rate = [&](const std::string& model_id) -> const PricingRate& {
        for (const auto& rate : profile.rates) {
            if (rate.model_id == model_id) return rate;
        }
        throw Error(ErrorKind::MissingRate, model_id);
    };

    if (models.empty()) {
        for (const auto& rate : profile.rates)
            table.rows.push_back(
                project_cost(input_tokens_per_instance, output_tokens_per_instance, rate, n_instances));
    } else {
        for (const auto& model : models)
            table.rows.push_back(project_cost(input_tokens_per_instance, output_tokens_per_instance,
                                              find_rate(model), n_instances));
    }
    return table;
}

std::string render_cost_table(const CostTable& table) {
    std::ostringstream out;
    out << "Cost projection for " << table.n_instances << " instances ("
        << static_cast<long>(table.input_tokens_per_instance) << " in / "
        << static_cast<long>(table.output_tokens_per_instance) << " out tokens per instance)\n";
    out << std::left << std::setw(24) << "Model" << std::right << std::setw(12) << "In ($)"
        << std::setw(12) << "Out ($)" << std::setw(12) << "Total ($)" << "\n";
    out << std::fixed << std::setprecision(2);
    for (const auto& row : table.rows) {
        out << std::left << std::setw(24) << row.model_id << std::right << std::setw(12)
            << round_cents(row.input_cost) << std::setw(12) << round_cents(row.output_cost)
            << std::setw(12) << round_cents(row.total) << "\n";
    }
    if (table.default_split) {
        const double headline = round_cents(table.default_split->issues + table.default_split->tests);
        out << "Default-setting split: issues $" << round_cents(table.default_split->issues)
            << " + tests $" << round_cents(table.default_split->tests) << " = $" << headline << "\n";
    }
    return out.str();
}

PricingProfile table2_profile() {
    PricingProfile profile;
    profile.name = "table2";
    profile.rates = {
        {"gpt-4o", 0.834, 10.0},
        {"gpt-4.1", 0.666, 8.0},
        {"deepseek-reasoner", 0.1835, 0.551},
        {"gpt-4o-mini", 0.0496, 0.6},
    };
    profile.default_split = CostSplit{0.11, 4.99};
    return profile;
}

PricingProfile load_pricing(const std::filesystem::path& path) {
    json j = json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("rates"))
        throw Error(ErrorKind::ConfigError, "invalid pricing file: " + path.string());
    PricingProfile profile;
    profile.name = j.value("name", path.stem().string());
    for (const auto& entry : j["rates"]) {
        PricingRate rate;
        rate.model_id = entry.at("model_id").get<std::string>();
        rate.input_rate = entry.at("input_per_million").get<double>();
        rate.output_rate = entry.at("output_per_million").get<double>();
        if (rate.input_rate < 0 || rate.output_rate < 0)
            throw Error(ErrorKind::ConfigError, "negative rate for " + rate.model_id);
        profile.rates.push_back(std::move(rate));
    }
    if (j.contains("default_split")) {
        CostSplit split;
        split.issues = j["default_split"].at("issues").get<double>();
        split.tests = j["default_split"].at("tests").get<double>();
        profile.default_split = split;
    }
    return profile;
}

PricingProfile resolve_pricing(const std::string& name_or_path) {
    if (name_or_path == "table2") return table2_profile();
    if (std::filesystem::exists(name_or_path)) return load_pricing(name_or_path);
    throw Error(ErrorKind::ConfigError, "unknown pricing profile: " + name_or_path);
}

}  // namespace swelabel::costkit
