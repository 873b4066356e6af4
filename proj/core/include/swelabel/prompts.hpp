#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swelabel/preprocess.hpp"
#include "swelabel/repomap.hpp"
#include "swelabel/types.hpp"

namespace swelabel::prompts {

// Ordered criteria the model is told to weigh; versioned by hash.
std::vector<std::string> default_checklist();
std::vector<std::string> load_checklist(const std::filesystem::path& path);
std::string checklist_hash(const std::vector<std::string>& checklist);

// Editable prompt templates with {slot} placeholders. Missing files fall
// back to the built-in defaults.
struct Templates {
    std::string ica;
    std::string tca;
    std::string difficulty;
    std::string aux_extract;

    static Templates defaults();
    static Templates load_dir(const std::filesystem::path& dir);

    std::string hash(Task task) const;
};

const std::string& scale_text(Task task);

// Rationale-informed clarity prompt: scale, checklist, cleaned title and
// body in delimited blocks, structured-output instructions, zero worked
// examples.
std::string build_ica_prompt(const preprocess::CleanIssue& issue,
                             const std::vector<std::string>& checklist,
                             const Templates& templates);

struct FocusFile {
    std::string path;
    std::string text;
    bool missing_at_base = false;  // introduced by the patch, noted in prompt
    bool trimmed = false;          // reduced to hunk regions
};

// Coverage prompt: scale, cleaned issue, both patches verbatim, focus file
// texts in per-path blocks, repo map last.
std::string build_tca_prompt(const Instance& instance, const preprocess::CleanIssue& issue,
                             const repomap::RepoMapText& repo_map,
                             const std::vector<FocusFile>& focus_files, const Templates& templates);

// Identical structure to the TCA prompt; only the task description and
// scale differ.
std::string build_difficulty_prompt(const Instance& instance, const preprocess::CleanIssue& issue,
                                    const repomap::RepoMapText& repo_map,
                                    const std::vector<FocusFile>& focus_files,
                                    const Templates& templates);

std::string build_aux_extract_prompt(const std::string& raw_output, const Templates& templates);

struct IcaOutcome {
    Score score{0};
    std::string rationale;
    bool candidate_solution = false;
    bool used_fallback = false;
};

struct TcaOutcome {
    Score score{0};
    std::string rationale;
    std::optional<std::string> counter_example;
    bool missing_counter_example = false;  // score > 0 but no counter-example given
    bool used_fallback = false;
};

// Structured block first (SCORE / RATIONALE / CANDIDATE_SOLUTION); falls
// back to the first standalone digit 0-3 with the full text as rationale.
// Throws UnparseableOutput when no score can be found anywhere.
IcaOutcome parse_ica_output(const std::string& text);

// Local structural parse of SCORE / RATIONALE / COUNTER_EXAMPLE. The
// counter-example is kept iff score > 0; a missing one only sets a flag.
TcaOutcome parse_tca_output(const std::string& text);

// Renderers for the structured block grammar (round-trip partners of the
// parsers; rationales must not start lines with field keys).
std::string render_ica_block(const IcaOutcome& outcome);
std::string render_tca_block(const TcaOutcome& outcome);

// First standalone digit 0-3 in free text, if any.
std::optional<int> find_standalone_score(const std::string& text);

}  // namespace swelabel::prompts
