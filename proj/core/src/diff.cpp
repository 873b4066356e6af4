#include "swelabel/diff.hpp"

#include <algorithm>
#include <optional>

#include "swelabel/errors.hpp"
#include "swelabel/util.hpp"

namespace swelabel::diff {

namespace {

std::string strip_prefix(std::string path) {
    // "a/", "b/" and quoted forms; tabs terminate git paths with timestamps.
    if (!path.empty() && path.front() == '"' && path.back() == '"' && path.size() >= 2)
        path = path.substr(1, path.size() - 2);
    std::size_t tab = path.find('\t');
    if (tab != std::string::npos) path = path.substr(0, tab);
    if (util::starts_with(path, "a/") || util::starts_with(path, "b/")) path = path.substr(2);
    return path;
}

struct HunkHeader {
    long old_start = 0, old_count = 0, new_start = 0, new_count = 0;
};

std::optional<HunkHeader> parse_hunk_header(const std::string& line) {
    // @@ -l[,c] +l[,c] @@ optional section text
    if (!util::starts_with(line, "@@ ")) return std::nullopt;
    std::size_t close = line.find(" @@", 3);
    if (close == std::string::npos) return std::nullopt;
    std::string ranges = line.substr(3, close - 3);
    auto parts = util::split(ranges, ' ');
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) return std::nullopt;
    if (parts[0][0] != '-' || parts[1][0] != '+') return std::nullopt;
    auto parse_range = [](const std::string& s, long& start, long& count) -> bool {
        auto nums = util::split(s.substr(1), ',');
        if (nums.empty() || nums.size() > 2) return false;
        try {
            start = std::stol(nums[0]);
            count = nums.size() == 2 ? std::stol(nums[1]) : 1;
        } catch (...) {
            return false;
        }
        return start >= 0 && count >= 0;
    };
    HunkHeader h;
    if (!parse_range(parts[0], h.old_start, h.old_count)) return std::nullopt;
    if (!parse_range(parts[1], h.new_start, h.new_count)) return std::nullopt;
    return h;
}

// Shared walk over the diff; calls on_file for each ---/+++ pair and
// on_hunk for each hunk header belonging to the current file.
template <typename FileFn, typename HunkFn>
void walk(const std::string& patch_text, FileFn on_file, HunkFn on_hunk) {
    const auto lines = util::split_lines(patch_text);
    std::size_t i = 0;
    bool in_file = false;
    while (i < lines.size()) {
        const std::string& line = lines[i];
        if (util::starts_with(line, "--- ")) {
            if (i + 1 >= lines.size() || !util::starts_with(lines[i + 1], "+++ "))
                throw Error(ErrorKind::DiffParseError,
                            "'---' header at line " + std::to_string(i + 1) + " lacks a '+++' line");
            std::string old_path = strip_prefix(util::trim(line.substr(4)));
            std::string new_path = strip_prefix(util::trim(lines[i + 1].substr(4)));
            std::string target;
            if (new_path != "/dev/null") {
                target = new_path;
            } else if (old_path != "/dev/null") {
                target = old_path;
            }
            if (!target.empty()) on_file(target);
            in_file = !target.empty();
            i += 2;
            continue;
        }
        if (auto hunk = parse_hunk_header(line)) {
            if (!in_file)
                throw Error(ErrorKind::DiffParseError,
                            "hunk header before any file header at line " + std::to_string(i + 1));
            on_hunk(*hunk);
            // Consume exactly the body lines announced by the header so that
            // body content can never be mistaken for a header.
            long old_left = hunk->old_count;
            long new_left = hunk->new_count;
            ++i;
            while ((old_left > 0 || new_left > 0) && i < lines.size()) {
                const std::string& body = lines[i];
                if (body.empty() || body[0] == ' ') {
                    --old_left;
                    --new_left;
                } else if (body[0] == '-') {
                    --old_left;
                } else if (body[0] == '+') {
                    --new_left;
                } else if (body[0] == '\\') {
                    // "\ No newline at end of file"
                } else {
                    throw Error(ErrorKind::DiffParseError,
                                "unexpected hunk body at line " + std::to_string(i + 1));
                }
                ++i;
            }
            if (old_left > 0 || new_left > 0)
                throw Error(ErrorKind::DiffParseError, "truncated hunk at end of patch");
            continue;
        }
        // diff --git, index, mode, rename, binary markers and loose prose.
        ++i;
    }
}

}  // namespace

std::vector<std::string> patch_files(const std::string& patch_text) {
    std::vector<std::string> out;
    walk(
        patch_text,
        [&](const std::string& path) {
            if (std::find(out.begin(), out.end(), path) == out.end()) out.push_back(path);
        },
        [](const HunkHeader&) {});
    return out;
}

std::map<std::string, std::vector<HunkRange>> patch_hunks(const std::string& patch_text) {
    std::map<std::string, std::vector<HunkRange>> out;
    std::string current;
    walk(
        patch_text, [&](const std::string& path) { current = path; },
        [&](const HunkHeader& h) {
            if (current.empty()) return;
            HunkRange range;
            if (h.new_count > 0) {
                range.start = std::max(1L, h.new_start);
                range.count = h.new_count;
            } else {
                range.start = std::max(1L, h.old_start);
                range.count = h.old_count;
            }
            out[current].push_back(range);
        });
    return out;
}

}  // namespace swelabel::diff
