#include "swelabel/tca.hpp"

#include <algorithm>
#include <set>

#include "swelabel/diff.hpp"
#include "swelabel/util.hpp"

namespace swelabel::tca {

namespace {

constexpr int kRetrySeedOffset = 7919;

std::set<std::string> focus_paths(const Instance& instance) {
    std::set<std::string> out;
    for (const auto& p : diff::patch_files(instance.gold_patch)) out.insert(p);
    for (const auto& p : diff::patch_files(instance.test_patch)) out.insert(p);
    return out;
}

std::string trim_to_hunks(const std::string& text, const std::vector<diff::HunkRange>& hunks,
                          long margin) {
    const auto lines = util::split_lines(text);
    std::vector<bool> keep(lines.size(), false);
    for (const auto& h : hunks) {
        const long lo = std::max(1L, h.start - margin);
        const long hi = std::min<long>(static_cast<long>(lines.size()), h.start + h.count + margin);
        for (long l = lo; l <= hi; ++l) keep[static_cast<std::size_t>(l - 1)] = true;
    }
    std::string out;
    bool in_gap = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (keep[i]) {
            out += lines[i];
            out += '\n';
            in_gap = false;
        } else if (!in_gap) {
            out += "...\n";
            in_gap = true;
        }
    }
    return out;
}

std::vector<RunResult> run_repo_task(Task task, const Instance& instance, const ModelSpec& spec,
                                     const ModelSpec& aux_spec, gateway::ModelGateway& gw,
                                     repomap::RepoMapBuilder& builder,
                                     const workspace::GitConfig& git, const TcaOptions& options) {
    if (options.runs < 1) throw Error(ErrorKind::ConfigError, "runs must be >= 1");

    // Fail fast before any FM call.
    const Workspace ws = workspace::checkout_workspace(instance, git);

    const auto issue =
        preprocess::clean_issue(instance.issue_title, instance.issue_body, options.strip_rules);
    const auto focus = focus_paths(instance);
    const auto mentions = repomap::identifier_tokens(issue.title + "\n" + issue.body);
    const auto focus_files = collect_focus_files(instance, ws, spec, options);

    auto assemble = [&](long budget) {
        const auto map = builder.build(ws, focus, mentions, budget);
        return task == Task::Tca
                   ? prompts::build_tca_prompt(instance, issue, map, focus_files, options.templates)
                   : prompts::build_difficulty_prompt(instance, issue, map, focus_files,
                                                      options.templates);
    };

    std::string prompt = assemble(options.map_budget);
    if (repomap::estimate_tokens(prompt) > spec.context_tokens) {
        prompt = assemble(1);  // repo-map floor: a single block
        const long estimate = repomap::estimate_tokens(prompt);
        if (estimate > spec.context_tokens)
            throw Error(ErrorKind::ContextBudgetExceeded,
                        "estimated " + std::to_string(estimate) + " tokens exceeds context of " +
                            std::to_string(spec.context_tokens));
    }

    std::vector<RunResult> results;
    for (int run = 0; run < options.runs; ++run) {
        gateway::CallContext ctx{instance.instance_id, task, run, CallKind::Completion};
        RunResult result;
        result.run_index = run;
        result.task = task;

        int seed_hint = options.seed + run;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const Completion completion = gw.complete(spec, prompt, seed_hint, ctx);
            result.raw_output = completion.text;
            try {
                const auto outcome =
                    parse_score_with_auxiliary(completion.text, aux_spec, gw, ctx, options.templates);
                result.score = outcome.score;
                result.rationale = outcome.rationale;
                if (task == Task::Tca) {
                    result.counter_example = outcome.counter_example;
                    if (outcome.missing_counter_example)
                        result.flags.push_back("missing_counter_example");
                }
                if (outcome.used_fallback) result.flags.push_back("fallback_parse");
                break;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::UnparseableOutput) throw;
                if (attempt == 0) {
                    seed_hint += kRetrySeedOffset;
                    continue;
                }
                result.score.reset();
                result.rationale = completion.text;
                result.flags.push_back("unparseable");
            }
        }
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace

std::vector<prompts::FocusFile> collect_focus_files(const Instance& instance, const Workspace& ws,
                                                    const ModelSpec& spec,
                                                    const TcaOptions& options) {
    std::vector<prompts::FocusFile> out;
    auto hunks_gold = diff::patch_hunks(instance.gold_patch);
    auto hunks_test = diff::patch_hunks(instance.test_patch);

    long total_bytes = 0;
    std::vector<std::pair<std::string, std::string>> present;  // path, text
    for (const auto& path : focus_paths(instance)) {
        const auto abs = ws.root_path / path;
        if (!std::filesystem::exists(abs)) {
            prompts::FocusFile f;
            f.path = path;
            f.missing_at_base = true;
            out.push_back(std::move(f));
            continue;
        }
        std::string text = util::read_file(abs);
        total_bytes += static_cast<long>(text.size());
        present.emplace_back(path, std::move(text));
    }

    const long focus_tokens = (total_bytes + 3) / 4;
    const bool trim = focus_tokens > static_cast<long>(options.focus_context_share *
                                                       static_cast<double>(spec.context_tokens));
    for (auto& [path, text] : present) {
        prompts::FocusFile f;
        f.path = path;
        if (trim) {
            std::vector<diff::HunkRange> hunks;
            if (auto it = hunks_gold.find(path); it != hunks_gold.end())
                hunks.insert(hunks.end(), it->second.begin(), it->second.end());
            if (auto it = hunks_test.find(path); it != hunks_test.end())
                hunks.insert(hunks.end(), it->second.begin(), it->second.end());
            if (!hunks.empty()) {
                f.text = trim_to_hunks(text, hunks, options.trim_margin_lines);
                f.trimmed = true;
            } else {
                f.text = std::move(text);
            }
        } else {
            f.text = std::move(text);
        }
        out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end(),
              [](const prompts::FocusFile& a, const prompts::FocusFile& b) { return a.path < b.path; });
    return out;
}

prompts::TcaOutcome parse_score_with_auxiliary(const std::string& raw_text, const ModelSpec& aux_spec,
                                               gateway::ModelGateway& gw,
                                               const gateway::CallContext& ctx,
                                               const prompts::Templates& templates) {
    if (raw_text.empty()) throw Error(ErrorKind::UnparseableOutput, "empty model output");
    try {
        return prompts::parse_tca_output(raw_text);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnparseableOutput) throw;
    }

    gateway::CallContext aux_ctx = ctx;
    aux_ctx.call_kind = CallKind::AuxParse;
    const std::string aux_prompt = prompts::build_aux_extract_prompt(raw_text, templates);
    const Completion reply = gw.complete(aux_spec, aux_prompt, ctx.run_index, aux_ctx);

    const auto digit = prompts::find_standalone_score(reply.text);
    if (!digit)
        throw Error(ErrorKind::UnparseableOutput,
                    "auxiliary extraction returned no usable score: " + reply.text.substr(0, 120));
    prompts::TcaOutcome outcome;
    outcome.score = Score(*digit);
    outcome.rationale = raw_text;
    outcome.missing_counter_example = outcome.score.value() > 0;
    outcome.used_fallback = true;
    return outcome;
}

std::vector<RunResult> run_tca(const Instance& instance, const ModelSpec& spec,
                               const ModelSpec& aux_spec, gateway::ModelGateway& gw,
                               repomap::RepoMapBuilder& builder, const workspace::GitConfig& git,
                               const TcaOptions& options) {
    return run_repo_task(Task::Tca, instance, spec, aux_spec, gw, builder, git, options);
}

std::vector<RunResult> run_difficulty(const Instance& instance, const ModelSpec& spec,
                                      const ModelSpec& aux_spec, gateway::ModelGateway& gw,
                                      repomap::RepoMapBuilder& builder,
                                      const workspace::GitConfig& git, const TcaOptions& options) {
    return run_repo_task(Task::Difficulty, instance, spec, aux_spec, gw, builder, git, options);
}

}  // namespace swelabel::tca
