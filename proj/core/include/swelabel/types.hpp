#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swelabel/errors.hpp"

namespace swelabel {

enum class Task { Ica, Tca, Difficulty };

const char* to_string(Task task);
Task task_from_string(const std::string& name);

// Ordinal 0..3 score shared by the clarity, coverage and difficulty scales.
class Score {
public:
    explicit Score(int value) : value_(value) {
        if (value < 0 || value > 3)
            throw Error(ErrorKind::DomainError, "score must be in 0..3, got " + std::to_string(value));
    }
    int value() const noexcept { return value_; }
    auto operator<=>(const Score&) const = default;

private:
    int value_;
};

enum class IssueLabel { WellSpecified, Underspecified };
enum class TestLabel { Adequate, Inadequate };

// Task-agnostic face of the two binary labels. Positive corresponds to
// score in {0,1}: WellSpecified for ICA, Adequate for TCA.
enum class BinaryLabel { Positive, Negative };

std::string binary_label_name(Task task, BinaryLabel label);
std::optional<BinaryLabel> binary_label_from_name(const std::string& name);

enum class ConsensusRule { Majority, Median };

const char* to_string(ConsensusRule rule);

// One SWE-bench-style code-repair row.
struct Instance {
    std::string instance_id;
    std::string repo;         // "owner/name"
    std::string base_commit;  // 7-40 hex chars
    std::string issue_title;
    std::string issue_body;
    std::string gold_patch;
    std::string test_patch;
    std::vector<std::string> fail_to_pass;
    std::vector<std::string> pass_to_pass;
    // Unknown input fields, preserved verbatim (key -> compact JSON value).
    std::map<std::string, std::string> extras;
};

enum class CallKind { Completion, Embedding, AuxParse };

const char* to_string(CallKind kind);

struct UsageRecord {
    std::string instance_id;
    Task task = Task::Ica;
    int run_index = 0;
    std::string model_id;
    long input_tokens = 0;
    long output_tokens = 0;
    double latency_s = 0.0;
    CallKind call_kind = CallKind::Completion;
    bool approximate = false;  // token counts estimated as ceil(bytes/4)
    bool failed = false;       // attempt consumed tokens but did not yield a usable reply
    std::string manifest;
};

struct ModelSpec {
    std::string model_id;
    double temperature = 1.0;
    int max_output_tokens = 4096;
    std::string endpoint = "stub";  // URL or "stub"
    std::string api_key_env;
    long context_tokens = 128000;  // prompt-size guard for context budgeting
};

struct Completion {
    std::string text;
    UsageRecord usage;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::string model_id;
};

// One stochastic pipeline run. score is absent when the output stayed
// unparseable after the retry; such runs carry the "unparseable" flag.
struct RunResult {
    int run_index = 0;
    Task task = Task::Ica;
    std::optional<Score> score;
    std::string rationale;
    std::optional<bool> candidate_solution;      // ICA only
    std::optional<std::string> counter_example;  // TCA only
    std::vector<std::string> flags;
    std::string raw_output;
};

// Consensus output per instance per task.
struct LabelRecord {
    std::string instance_id;
    Task task = Task::Ica;
    std::vector<RunResult> runs;
    Score consensus_score{0};
    std::optional<BinaryLabel> binary_label;  // absent for Difficulty
    double confidence = 0.0;
    ConsensusRule rule = ConsensusRule::Majority;
    int valid_run_count = 0;
    std::string model_id;
    std::string template_hash;
    std::string checklist_hash;
    std::string manifest;
    std::string timestamp;  // ISO-8601 UTC
};

// Read-only checkout of repo@commit under the cache directory.
struct Workspace {
    std::filesystem::path root_path;
    std::string repo;
    std::string checked_out_commit;
    bool dirty = false;
};

}  // namespace swelabel
