#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "swelabel/gateway.hpp"
#include "swelabel/ica.hpp"
#include "swelabel/tca.hpp"
#include "swelabel/types.hpp"
#include "swelabel/workspace.hpp"

namespace swelabel::pipeline {

struct LabelJobConfig {
    std::filesystem::path dataset;
    std::vector<Task> tasks = {Task::Ica};
    ModelSpec model;
    ModelSpec aux_model;
    int runs = 3;
    int seed = 0;
    long map_budget = 1024;
    int parallel = 4;
    std::filesystem::path out_dir;
    workspace::GitConfig git;
    prompts::Templates templates = prompts::Templates::defaults();
    std::vector<std::string> checklist = prompts::default_checklist();
    std::vector<preprocess::StripRule> strip_rules = preprocess::default_rules();
    std::shared_ptr<gateway::Backend> backend;  // defaults to the stub
    gateway::GatewayConfig gateway;
};

// Snapshot of everything that determines outputs; its hash stamps every
// record so any output traces back to an exact configuration.
struct RunManifest {
    std::string config_json;  // canonical snapshot
    std::string hash;
    std::string started_at;
    std::string finished_at;
};

RunManifest make_manifest(const LabelJobConfig& config);

struct LabelJobResult {
    long labeled = 0;
    long skipped = 0;  // resume hits
    long failed = 0;
    std::filesystem::path records_path;
    std::filesystem::path usage_path;
    std::filesystem::path manifest_path;
    std::vector<std::string> errors;
};

// Batch labeling with a bounded worker pool. Records are emitted in
// dataset order regardless of completion order; instances already present
// in the output are skipped (resume by id, not offset).
LabelJobResult run_label_job(const LabelJobConfig& config);

// Builds a LabelRecord from finished runs (consensus over valid scores).
LabelRecord make_label_record(const Instance& instance, Task task,
                              const std::vector<RunResult>& runs, const LabelJobConfig& config,
                              const RunManifest& manifest, bool deterministic_clock);

struct SimilarityReport {
    std::vector<double> seat_medians;  // seat i vs matching run, median over instances
    double corpus_median = 0.0;        // combined-vs-combined
    double human_word_median = 0.0;
    double run_word_median = 0.0;
    long n_instances = 0;
};

// Human rationales file: one JSON object per line,
// {"instance_id":..., "rationales": ["...", "...", "..."]}.
SimilarityReport similarity_report(const std::vector<LabelRecord>& records,
                                   const std::filesystem::path& human_file,
                                   gateway::ModelGateway& gw, const ModelSpec& embed_spec);

std::string utc_timestamp();

}  // namespace swelabel::pipeline
