#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "swelabel/types.hpp"

namespace swelabel::dataset {

// Line-delimited JSON records using the public SWE-bench column names
// (instance_id, repo, base_commit, problem_statement, patch, test_patch,
// FAIL_TO_PASS, PASS_TO_PASS). When problem_statement is present and
// issue_title/issue_body are not, the first line becomes the title.
// Unknown fields are preserved in Instance::extras.
std::vector<Instance> load_instances(const std::filesystem::path& path);

std::vector<Instance> parse_instances(const std::string& text);
std::string serialize_instance(const Instance& instance);

void write_records(const std::filesystem::path& path, const std::vector<LabelRecord>& records);
std::vector<LabelRecord> load_records(const std::filesystem::path& path);

std::string serialize_record(const LabelRecord& record);
LabelRecord parse_record(const std::string& line, std::size_t line_no);

void append_usage(const std::filesystem::path& path, const std::vector<UsageRecord>& records);
std::vector<UsageRecord> load_usage(const std::filesystem::path& path);
std::string serialize_usage(const UsageRecord& record);

}  // namespace swelabel::dataset
