#include "swelabel/prompts.hpp"

#include <cctype>

#include "swelabel/util.hpp"

namespace swelabel::prompts {

namespace {

// Single pass over the template: slot values are never rescanned, so
// brace sequences inside issue text or patches cannot hijack other slots.
std::string substitute(const std::string& text, const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            std::size_t close = text.find('}', i);
            if (close != std::string::npos) {
                auto it = slots.find(text.substr(i + 1, close - i - 1));
                if (it != slots.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

const std::string kIcaScale =
    "0 (Well-specified): Clear requirements; minimal ambiguity.\n"
    "1 (Minor ambiguity): Some details are missing but an experienced developer can infer a "
    "sensible solution.\n"
    "2 (Significant ambiguity): Vague description, multiple interpretations possible.\n"
    "3 (Poorly specified): Nearly impossible to derive meaningful solutions without additional "
    "clarification.";

const std::string kTcaScale =
    "0 (Perfect coverage): Tests cover all reasonable solutions.\n"
    "1 (Good coverage): Tests cover most solutions, though some atypical solutions may be "
    "missed.\n"
    "2 (Limited coverage): Tests overlook several reasonable solutions.\n"
    "3 (Poorly scoped): Tests are excessively narrow or overly broad, significantly misaligned "
    "with the issue requirements.";

const std::string kDifficultyScale =
    "0 (Trivial): Less than 15 minutes of effort.\n"
    "1 (Minor): Between 15 minutes and 1 hour of effort.\n"
    "2 (Moderate): Between 1 and 4 hours of effort.\n"
    "3 (Major): More than 4 hours of effort.";

// Context sections shared byte-for-byte by the TCA and difficulty prompts.
const std::string kRepoContext =
    "ISSUE TITLE:\n"
    "<<<TITLE\n{title}\nTITLE>>>\n\n"
    "ISSUE BODY:\n"
    "<<<BODY\n{body}\nBODY>>>\n\n"
    "GOLD PATCH:\n"
    "<<<GOLD_PATCH\n{gold_patch}\nGOLD_PATCH>>>\n\n"
    "TEST PATCH:\n"
    "<<<TEST_PATCH\n{test_patch}\nTEST_PATCH>>>\n\n"
    "FOCUS FILES (pinned read-only):\n{focus_files}\n"
    "REPOSITORY MAP (ranked summary of the repository):\n"
    "<<<REPO_MAP\n{repo_map}\nREPO_MAP>>>\n";

const std::string kIcaTemplate =
    "You are labeling a software issue report for clarity. Judge only the text below: assume no "
    "access to external links, the issue discussion thread, or the repository.\n\n"
    "Rate the issue on this scale:\n{scale}\n\n"
    "Weigh these criteria when deciding:\n{checklist}\n\n"
    "ISSUE TITLE:\n"
    "<<<TITLE\n{title}\nTITLE>>>\n\n"
    "ISSUE BODY:\n"
    "<<<BODY\n{body}\nBODY>>>\n\n"
    "Also report whether the issue already contains a candidate solution: a code snippet, patch "
    "outline, or textual hint describing how to fix the problem.\n\n"
    "Answer with exactly one fenced block of this form and nothing else:\n\n"
    "```\n"
    "SCORE: <0-3>\n"
    "RATIONALE: <your reasoning>\n"
    "CANDIDATE_SOLUTION: <yes or no>\n"
    "```\n";

const std::string kTcaTemplate =
    "You are assessing the regression tests of a code-repair task. Given the issue, the "
    "reference (gold) patch that resolved it, and the test patch that guards it, judge whether "
    "the tests would accept every reasonable fix.\n\n"
    "Rate the test coverage on this scale:\n{scale}\n\n" +
    kRepoContext +
    "\nWhen the score is higher than zero, include a concrete counter-example: a valid patch or "
    "behavior change that these tests would fail to detect.\n\n"
    "Answer with exactly one fenced block of this form and nothing else:\n\n"
    "```\n"
    "SCORE: <0-3>\n"
    "RATIONALE: <your reasoning>\n"
    "COUNTER_EXAMPLE: <required when SCORE > 0, otherwise omit this line>\n"
    "```\n";

const std::string kDifficultyTemplate =
    "You are estimating implementation effort for a code-repair task. Given the issue, the "
    "reference (gold) patch that resolved it, and the test patch that guards it, estimate how "
    "long an experienced developer already familiar with the codebase would need to write a "
    "patch that resolves the issue.\n\n"
    "Rate the expected effort on this scale:\n{scale}\n\n" +
    kRepoContext +
    "\nAnswer with exactly one fenced block of this form and nothing else:\n\n"
    "```\n"
    "SCORE: <0-3>\n"
    "RATIONALE: <your reasoning>\n"
    "```\n";

const std::string kAuxExtractTemplate =
    "Extract the final 0-3 score from the model output below. Return only the integer score "
    "0-3, nothing else.\n\n"
    "MODEL OUTPUT:\n{raw}\n";

std::string render_checklist(const std::vector<std::string>& checklist) {
    std::string out;
    for (std::size_t i = 0; i < checklist.size(); ++i) {
        if (i) out += '\n';
        out += "- " + checklist[i];
    }
    return out;
}

std::string render_focus_files(const std::vector<FocusFile>& focus_files) {
    if (focus_files.empty()) return "(no focus files)\n";
    std::string out;
    for (const auto& f : focus_files) {
        if (f.missing_at_base) {
            out += "(focus file " + f.path +
                   " does not exist at the base commit; it is introduced by the patch)\n";
            continue;
        }
        out += "<<<FILE " + f.path + "\n";
        if (f.trimmed) out += "(trimmed to the regions the patches touch)\n";
        out += f.text;
        if (!f.text.empty() && f.text.back() != '\n') out += '\n';
        out += "FILE " + f.path + ">>>\n";
    }
    return out;
}

std::string build_repo_prompt(const std::string& template_text, const Instance& instance,
                              const preprocess::CleanIssue& issue,
                              const repomap::RepoMapText& repo_map,
                              const std::vector<FocusFile>& focus_files, Task task) {
    return substitute(template_text, {{"scale", scale_text(task)},
                                      {"title", issue.title},
                                      {"body", issue.body},
                                      {"gold_patch", instance.gold_patch},
                                      {"test_patch", instance.test_patch},
                                      {"focus_files", render_focus_files(focus_files)},
                                      {"repo_map", repo_map.text}});
}

bool is_fence_line(const std::string& line) {
    const std::string t = util::trim(line);
    return util::starts_with(t, "```") || util::starts_with(t, "~~~");
}

bool is_field_line(const std::string& line, const char* key, std::string* value) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::string_view rest(line.data() + i, line.size() - i);
    const std::string prefix = std::string(key) + ":";
    if (!util::starts_with(rest, prefix)) return false;
    if (value) *value = util::trim(std::string(rest.substr(prefix.size())));
    return true;
}

bool is_any_field_line(const std::string& line) {
    return is_field_line(line, "SCORE", nullptr) || is_field_line(line, "RATIONALE", nullptr) ||
           is_field_line(line, "CANDIDATE_SOLUTION", nullptr) ||
           is_field_line(line, "COUNTER_EXAMPLE", nullptr);
}

struct StructuredBlock {
    std::optional<int> score;
    std::optional<std::string> rationale;
    std::optional<std::string> candidate;
    std::optional<std::string> counter_example;
};

std::optional<int> leading_score(const std::string& value) {
    if (value.empty()) return std::nullopt;
    if (value[0] < '0' || value[0] > '3') return std::nullopt;
    if (value.size() > 1 && (std::isalnum(static_cast<unsigned char>(value[1])) || value[1] == '.'))
        return std::nullopt;
    return value[0] - '0';
}

std::optional<StructuredBlock> parse_structured(const std::string& text) {
    const auto lines = util::split_lines(text);
    StructuredBlock block;
    std::string value;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_field_line(lines[i], "SCORE", &value) && !block.score) {
            block.score = leading_score(value);
            if (!block.score) return std::nullopt;  // a SCORE field with garbage
        } else if (is_field_line(lines[i], "RATIONALE", &value) && !block.rationale) {
            std::string rationale = value;
            while (i + 1 < lines.size() && !is_any_field_line(lines[i + 1]) &&
                   !is_fence_line(lines[i + 1])) {
                rationale += '\n' + lines[i + 1];
                ++i;
            }
            block.rationale = rationale;
        } else if (is_field_line(lines[i], "CANDIDATE_SOLUTION", &value) && !block.candidate) {
            block.candidate = value;
        } else if (is_field_line(lines[i], "COUNTER_EXAMPLE", &value) && !block.counter_example) {
            std::string counter = value;
            while (i + 1 < lines.size() && !is_any_field_line(lines[i + 1]) &&
                   !is_fence_line(lines[i + 1])) {
                counter += '\n' + lines[i + 1];
                ++i;
            }
            block.counter_example = counter;
        }
    }
    if (!block.score) return std::nullopt;
    return block;
}

}  // namespace

std::vector<std::string> default_checklist() {
    return {
        "problem statement completeness",
        "reproducibility information",
        "expected-vs-actual behavior",
        "success criteria",
        "ambiguity of scope",
        "presence of environment/context",
    };
}

std::vector<std::string> load_checklist(const std::filesystem::path& path) {
    std::vector<std::string> out;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        const std::string item = util::trim(line);
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw Error(ErrorKind::ConfigError, "empty checklist: " + path.string());
    return out;
}

std::string checklist_hash(const std::vector<std::string>& checklist) {
    std::string blob;
    for (const auto& item : checklist) {
        blob += item;
        blob += '\x1e';
    }
    return util::hex64(util::fnv1a64(blob));
}

Templates Templates::defaults() {
    Templates t;
    t.ica = kIcaTemplate;
    t.tca = kTcaTemplate;
    t.difficulty = kDifficultyTemplate;
    t.aux_extract = kAuxExtractTemplate;
    return t;
}

Templates Templates::load_dir(const std::filesystem::path& dir) {
    Templates t = defaults();
    auto maybe = [&](const char* file, std::string& slot) {
        const auto path = dir / file;
        if (std::filesystem::exists(path)) slot = util::read_file(path);
    };
    maybe("ica_prompt.txt", t.ica);
    maybe("tca_prompt.txt", t.tca);
    maybe("difficulty_prompt.txt", t.difficulty);
    maybe("aux_extract.txt", t.aux_extract);
    return t;
}

std::string Templates::hash(Task task) const {
    switch (task) {
        case Task::Ica: return util::hex64(util::fnv1a64(ica));
        case Task::Tca: return util::hex64(util::fnv1a64(tca));
        case Task::Difficulty: return util::hex64(util::fnv1a64(difficulty));
    }
    return {};
}

const std::string& scale_text(Task task) {
    switch (task) {
        case Task::Ica: return kIcaScale;
        case Task::Tca: return kTcaScale;
        case Task::Difficulty: return kDifficultyScale;
    }
    return kIcaScale;
}

std::string build_ica_prompt(const preprocess::CleanIssue& issue,
                             const std::vector<std::string>& checklist,
                             const Templates& templates) {
    if (checklist.empty()) throw Error(ErrorKind::ConfigError, "checklist must be non-empty");
    return substitute(templates.ica, {{"scale", scale_text(Task::Ica)},
                                      {"checklist", render_checklist(checklist)},
                                      {"title", issue.title},
                                      {"body", issue.body}});
}

std::string build_tca_prompt(const Instance& instance, const preprocess::CleanIssue& issue,
                             const repomap::RepoMapText& repo_map,
                             const std::vector<FocusFile>& focus_files,
                             const Templates& templates) {
    return build_repo_prompt(templates.tca, instance, issue, repo_map, focus_files, Task::Tca);
}

std::string build_difficulty_prompt(const Instance& instance, const preprocess::CleanIssue& issue,
                                    const repomap::RepoMapText& repo_map,
                                    const std::vector<FocusFile>& focus_files,
                                    const Templates& templates) {
    return build_repo_prompt(templates.difficulty, instance, issue, repo_map, focus_files,
                             Task::Difficulty);
}

std::string build_aux_extract_prompt(const std::string& raw_output, const Templates& templates) {
    return substitute(templates.aux_extract, {{"raw", raw_output}});
}

IcaOutcome parse_ica_output(const std::string& text) {
    if (auto block = parse_structured(text)) {
        IcaOutcome outcome;
        outcome.score = Score(*block->score);
        outcome.rationale = block->rationale.value_or("");
        const std::string candidate = util::to_lower(block->candidate.value_or("no"));
        outcome.candidate_solution = candidate == "yes" || candidate == "true";
        return outcome;
    }
    if (auto digit = find_standalone_score(text)) {
        IcaOutcome outcome;
        outcome.score = Score(*digit);
        outcome.rationale = text;
        outcome.candidate_solution = false;
        outcome.used_fallback = true;
        return outcome;
    }
    throw Error(ErrorKind::UnparseableOutput, "no score in 0..3 found");
}

TcaOutcome parse_tca_output(const std::string& text) {
    if (auto block = parse_structured(text)) {
        TcaOutcome outcome;
        outcome.score = Score(*block->score);
        outcome.rationale = block->rationale.value_or("");
        if (outcome.score.value() > 0) {
            if (block->counter_example && !util::trim(*block->counter_example).empty()) {
                outcome.counter_example = *block->counter_example;
            } else {
                outcome.missing_counter_example = true;
            }
        }
        return outcome;
    }
    if (auto digit = find_standalone_score(text)) {
        TcaOutcome outcome;
        outcome.score = Score(*digit);
        outcome.rationale = text;
        outcome.missing_counter_example = outcome.score.value() > 0;
        outcome.used_fallback = true;
        return outcome;
    }
    throw Error(ErrorKind::UnparseableOutput, "no score in 0..3 found");
}

std::string render_ica_block(const IcaOutcome& outcome) {
    return "SCORE: " + std::to_string(outcome.score.value()) + "\nRATIONALE: " + outcome.rationale +
           "\nCANDIDATE_SOLUTION: " + (outcome.candidate_solution ? "yes" : "no") + "\n";
}

std::string render_tca_block(const TcaOutcome& outcome) {
    std::string out = "SCORE: " + std::to_string(outcome.score.value()) +
                      "\nRATIONALE: " + outcome.rationale + "\n";
    if (outcome.counter_example) out += "COUNTER_EXAMPLE: " + *outcome.counter_example + "\n";
    return out;
}

std::optional<int> find_standalone_score(const std::string& text) {
    auto is_word = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '3') continue;
        if (i > 0 && is_word(text[i - 1])) continue;
        if (i + 1 < text.size() && is_word(text[i + 1])) continue;
        return text[i] - '0';
    }
    return std::nullopt;
}

}  // namespace swelabel::prompts
