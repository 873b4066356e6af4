#pragma once

#include <vector>

#include "swelabel/gateway.hpp"
#include "swelabel/prompts.hpp"
#include "swelabel/repomap.hpp"
#include "swelabel/types.hpp"
#include "swelabel/workspace.hpp"

namespace swelabel::tca {

struct TcaOptions {
    int runs = 3;
    int seed = 0;
    long map_budget = 1024;
    // Focus files larger than this share of the model context are trimmed
    // to the hunks' enclosing regions.
    double focus_context_share = 0.60;
    long trim_margin_lines = 40;
    prompts::Templates templates = prompts::Templates::defaults();
    std::vector<preprocess::StripRule> strip_rules = preprocess::default_rules();
};

// Local structural parse first; only when that fails is the auxiliary
// model asked to extract the integer score (logged as an AuxParse call).
prompts::TcaOutcome parse_score_with_auxiliary(const std::string& raw_text, const ModelSpec& aux_spec,
                                               gateway::ModelGateway& gw,
                                               const gateway::CallContext& ctx,
                                               const prompts::Templates& templates);

// Coverage pipeline: checkout (fail fast), one repo map per instance
// reused across runs, N completions, auxiliary-backed score parsing.
std::vector<RunResult> run_tca(const Instance& instance, const ModelSpec& spec,
                               const ModelSpec& aux_spec, gateway::ModelGateway& gw,
                               repomap::RepoMapBuilder& builder, const workspace::GitConfig& git,
                               const TcaOptions& options = {});

// Identical machinery with the effort template and scale.
std::vector<RunResult> run_difficulty(const Instance& instance, const ModelSpec& spec,
                                      const ModelSpec& aux_spec, gateway::ModelGateway& gw,
                                      repomap::RepoMapBuilder& builder,
                                      const workspace::GitConfig& git, const TcaOptions& options = {});

// Exposed for prompt-construction tests: assembles focus files (existing
// ones read, missing ones noted, oversized ones trimmed to hunk regions).
std::vector<prompts::FocusFile> collect_focus_files(const Instance& instance, const Workspace& ws,
                                                    const ModelSpec& spec, const TcaOptions& options);

}  // namespace swelabel::tca
