#pragma once

#include <vector>

#include "swelabel/gateway.hpp"
#include "swelabel/prompts.hpp"
#include "swelabel/types.hpp"

namespace swelabel::ica {

struct IcaOptions {
    int runs = 3;
    int seed = 0;
    prompts::Templates templates = prompts::Templates::defaults();
    std::vector<std::string> checklist = prompts::default_checklist();
    std::vector<preprocess::StripRule> strip_rules = preprocess::default_rules();
};

// N sequential stochastic runs over the cleaned issue. Never touches the
// repository. A run whose output stays unparseable after one retried
// completion is recorded without a score and flagged.
std::vector<RunResult> run_ica(const Instance& instance, const ModelSpec& spec,
                               gateway::ModelGateway& gw, const IcaOptions& options = {});

}  // namespace swelabel::ica
