#include "swelabel/dataset.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::dataset {

namespace {

const std::set<std::string> kKnownKeys = {
    "instance_id", "repo",       "base_commit",  "issue_title",  "issue_body",
    "problem_statement", "patch", "gold_patch",  "test_patch",   "FAIL_TO_PASS",
    "PASS_TO_PASS"};

bool is_hex(const std::string& s) {
    for (char c : s) {
        bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
        if (!ok) return false;
    }
    return true;
}

// FAIL_TO_PASS / PASS_TO_PASS arrive either as a JSON array or as a
// stringified array (the Hugging Face export stores them as strings).
std::vector<std::string> parse_test_list(const json& value, std::size_t line_no) {
    json arr = value;
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (util::trim(s).empty()) return {};
        arr = json::parse(s, nullptr, false);
        if (arr.is_discarded())
            throw errors::malformed_record(line_no, "test list string is not valid JSON");
    }
    if (!arr.is_array()) throw errors::malformed_record(line_no, "test list is not an array");
    std::vector<std::string> out;
    for (const auto& item : arr) {
        if (!item.is_string()) throw errors::malformed_record(line_no, "test list entry is not a string");
        out.push_back(item.get<std::string>());
    }
    return out;
}

Instance parse_instance_json(const json& row, std::size_t line_no) {
    if (!row.is_object()) throw errors::malformed_record(line_no, "record is not an object");
    Instance inst;
    if (!row.contains("instance_id") || !row["instance_id"].is_string() ||
        row["instance_id"].get<std::string>().empty())
        throw errors::malformed_record(line_no, "missing instance_id");
    inst.instance_id = row["instance_id"].get<std::string>();
    if (row.contains("repo") && row["repo"].is_string()) inst.repo = row["repo"].get<std::string>();
    if (row.contains("base_commit") && row["base_commit"].is_string())
        inst.base_commit = row["base_commit"].get<std::string>();
    if (!inst.base_commit.empty()) {
        if (inst.base_commit.size() < 7 || inst.base_commit.size() > 40 || !is_hex(inst.base_commit))
            throw errors::malformed_record(line_no, "base_commit is not 7-40 hex chars");
    }

    if (row.contains("issue_title") || row.contains("issue_body")) {
        if (row.contains("issue_title") && row["issue_title"].is_string())
            inst.issue_title = row["issue_title"].get<std::string>();
        if (row.contains("issue_body") && row["issue_body"].is_string())
            inst.issue_body = row["issue_body"].get<std::string>();
    } else if (row.contains("problem_statement") && row["problem_statement"].is_string()) {
        // First line is the title, the remainder the body.
        const std::string stmt = row["problem_statement"].get<std::string>();
        std::size_t nl = stmt.find('\n');
        if (nl == std::string::npos) {
            inst.issue_title = stmt;
        } else {
            inst.issue_title = stmt.substr(0, nl);
            inst.issue_body = stmt.substr(nl + 1);
        }
    }

    if (row.contains("patch") && row["patch"].is_string())
        inst.gold_patch = row["patch"].get<std::string>();
    else if (row.contains("gold_patch") && row["gold_patch"].is_string())
        inst.gold_patch = row["gold_patch"].get<std::string>();
    if (row.contains("test_patch") && row["test_patch"].is_string())
        inst.test_patch = row["test_patch"].get<std::string>();

    if (row.contains("FAIL_TO_PASS")) inst.fail_to_pass = parse_test_list(row["FAIL_TO_PASS"], line_no);
    if (row.contains("PASS_TO_PASS")) inst.pass_to_pass = parse_test_list(row["PASS_TO_PASS"], line_no);

    for (const auto& [key, value] : row.items()) {
        if (kKnownKeys.count(key) == 0) inst.extras[key] = value.dump();
    }
    return inst;
}

json run_to_json(const RunResult& run) {
    json j;
    j["run_index"] = run.run_index;
    if (run.score) j["score"] = run.score->value();
    j["rationale"] = run.rationale;
    if (run.candidate_solution) j["candidate_solution"] = *run.candidate_solution;
    if (run.counter_example) j["counter_example"] = *run.counter_example;
    if (!run.flags.empty()) j["flags"] = run.flags;
    j["raw_output"] = run.raw_output;
    return j;
}

RunResult run_from_json(const json& j, Task task) {
    RunResult run;
    run.task = task;
    run.run_index = j.at("run_index").get<int>();
    if (j.contains("score")) run.score = Score(j["score"].get<int>());
    run.rationale = j.value("rationale", std::string{});
    if (j.contains("candidate_solution")) run.candidate_solution = j["candidate_solution"].get<bool>();
    if (j.contains("counter_example")) run.counter_example = j["counter_example"].get<std::string>();
    if (j.contains("flags")) run.flags = j["flags"].get<std::vector<std::string>>();
    run.raw_output = j.value("raw_output", std::string{});
    return run;
}

}  // namespace

std::vector<Instance> parse_instances(const std::string& text) {
    std::vector<Instance> out;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(text)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded()) throw errors::malformed_record(line_no, "invalid JSON");
        Instance inst = parse_instance_json(row, line_no);
        if (!seen.insert(inst.instance_id).second) throw errors::duplicate_id(inst.instance_id);
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<Instance> load_instances(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw errors::io("dataset not found: " + path.string());
    return parse_instances(util::read_file(path));
}

std::string serialize_instance(const Instance& instance) {
    json row;
    row["instance_id"] = instance.instance_id;
    row["repo"] = instance.repo;
    row["base_commit"] = instance.base_commit;
    row["issue_title"] = instance.issue_title;
    row["issue_body"] = instance.issue_body;
    row["patch"] = instance.gold_patch;
    row["test_patch"] = instance.test_patch;
    row["FAIL_TO_PASS"] = instance.fail_to_pass;
    row["PASS_TO_PASS"] = instance.pass_to_pass;
    for (const auto& [key, value] : instance.extras) row[key] = json::parse(value);
    return row.dump();
}

std::string serialize_record(const LabelRecord& record) {
    json j;
    j["instance_id"] = record.instance_id;
    j["task"] = to_string(record.task);
    j["consensus_score"] = record.consensus_score.value();
    if (record.binary_label)
        j["binary_label"] = binary_label_name(record.task, *record.binary_label);
    j["confidence"] = record.confidence;
    j["rule"] = to_string(record.rule);
    j["valid_run_count"] = record.valid_run_count;
    j["model_id"] = record.model_id;
    j["template_hash"] = record.template_hash;
    if (!record.checklist_hash.empty()) j["checklist_hash"] = record.checklist_hash;
    if (!record.manifest.empty()) j["manifest"] = record.manifest;
    j["timestamp"] = record.timestamp;
    json runs = json::array();
    for (const auto& run : record.runs) runs.push_back(run_to_json(run));
    j["runs"] = runs;
    return j.dump();
}

LabelRecord parse_record(const std::string& line, std::size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw errors::malformed_record(line_no, "invalid JSON record");
    LabelRecord rec;
    try {
        rec.instance_id = j.at("instance_id").get<std::string>();
        rec.task = task_from_string(j.at("task").get<std::string>());
        rec.consensus_score = Score(j.at("consensus_score").get<int>());
        if (j.contains("binary_label"))
            rec.binary_label = binary_label_from_name(j["binary_label"].get<std::string>());
        rec.confidence = j.at("confidence").get<double>();
        rec.rule = j.at("rule").get<std::string>() == "majority" ? ConsensusRule::Majority
                                                                 : ConsensusRule::Median;
        rec.valid_run_count = j.at("valid_run_count").get<int>();
        rec.model_id = j.value("model_id", std::string{});
        rec.template_hash = j.value("template_hash", std::string{});
        rec.checklist_hash = j.value("checklist_hash", std::string{});
        rec.manifest = j.value("manifest", std::string{});
        rec.timestamp = j.value("timestamp", std::string{});
        for (const auto& run : j.at("runs")) rec.runs.push_back(run_from_json(run, rec.task));
    } catch (const json::exception& e) {
        throw errors::malformed_record(line_no, e.what());
    }
    return rec;
}

void write_records(const std::filesystem::path& path, const std::vector<LabelRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw errors::io("cannot open for writing: " + path.string());
    for (const auto& rec : records) {
        out << serialize_record(rec) << '\n';
        if (!out) throw errors::io("write failed: " + path.string());
    }
}

std::vector<LabelRecord> load_records(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw errors::io("records not found: " + path.string());
    std::vector<LabelRecord> out;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        out.push_back(parse_record(line, line_no));
    }
    return out;
}

std::string serialize_usage(const UsageRecord& record) {
    json j;
    j["instance_id"] = record.instance_id;
    j["task"] = to_string(record.task);
    j["run_index"] = record.run_index;
    j["model_id"] = record.model_id;
    j["input_tokens"] = record.input_tokens;
    j["output_tokens"] = record.output_tokens;
    j["latency_s"] = record.latency_s;
    j["call_kind"] = to_string(record.call_kind);
    if (record.approximate) j["approximate"] = true;
    if (record.failed) j["failed"] = true;
    if (!record.manifest.empty()) j["manifest"] = record.manifest;
    return j.dump();
}

void append_usage(const std::filesystem::path& path, const std::vector<UsageRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw errors::io("cannot open for append: " + path.string());
    for (const auto& rec : records) {
        out << serialize_usage(rec) << '\n';
        if (!out) throw errors::io("write failed: " + path.string());
    }
}

std::vector<UsageRecord> load_usage(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw errors::io("usage log not found: " + path.string());
    std::vector<UsageRecord> out;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw errors::malformed_record(line_no, "invalid usage JSON");
        UsageRecord rec;
        rec.instance_id = j.value("instance_id", std::string{});
        rec.task = task_from_string(j.value("task", std::string{"ica"}));
        rec.run_index = j.value("run_index", 0);
        rec.model_id = j.value("model_id", std::string{});
        rec.input_tokens = j.value("input_tokens", 0L);
        rec.output_tokens = j.value("output_tokens", 0L);
        rec.latency_s = j.value("latency_s", 0.0);
        const std::string kind = j.value("call_kind", std::string{"completion"});
        rec.call_kind = kind == "embedding"  ? CallKind::Embedding
                        : kind == "aux_parse" ? CallKind::AuxParse
                                              : CallKind::Completion;
        rec.approximate = j.value("approximate", false);
        rec.failed = j.value("failed", false);
        rec.manifest = j.value("manifest", std::string{});
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace swelabel::dataset
