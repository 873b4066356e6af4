#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "swelabel/types.hpp"

namespace swelabel::workspace {

struct GitConfig {
    std::filesystem::path cache_dir = "cache";
    // Local mirror directory searched as <mirror>/<owner>__<name> and
    // <mirror>/<owner>/<name> before falling back to the URL template.
    std::filesystem::path mirror_dir;
    std::string url_template = "https://github.com/{repo}.git";
};

// Checks out instance.repo at instance.base_commit under
// cache/<owner>__<name>/<sha>/ and reuses an existing checkout. Checkouts
// of the same (repo, commit) are mutually exclusive across threads.
Workspace checkout_workspace(const Instance& instance, const GitConfig& config);

// Wraps an already-materialized directory (fixtures, ad-hoc inspection).
Workspace from_dir(const std::filesystem::path& root);

// True when `git status --porcelain` reports nothing.
bool is_clean(const Workspace& ws);

struct GitResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

GitResult run_git(const std::vector<std::string>& args, const std::filesystem::path& cwd = {});

}  // namespace swelabel::workspace
