#pragma once

#include <map>
#include <string>
#include <vector>

namespace swelabel::diff {

// Target paths touched by a unified diff, de-duplicated in order of first
// appearance. Paths come from the ---/+++ header pairs with the a/ b/
// prefixes stripped; a /dev/null new side (deletion) falls back to the old
// side. Hunk bodies never influence the result.
std::vector<std::string> patch_files(const std::string& patch_text);

struct HunkRange {
    long start = 0;  // 1-based line in the post-image (pre-image for deletions)
    long count = 0;
};

// Per-file hunk line ranges, used to trim oversized focus files down to the
// regions a patch actually touches.
std::map<std::string, std::vector<HunkRange>> patch_hunks(const std::string& patch_text);

}  // namespace swelabel::diff
