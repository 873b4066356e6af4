#include "swelabel/ica.hpp"

namespace swelabel::ica {

namespace {
// Retried completions get a shifted seed so the stub (and seeded
// providers) produce a genuinely different sample.
constexpr int kRetrySeedOffset = 7919;
}  // namespace

std::vector<RunResult> run_ica(const Instance& instance, const ModelSpec& spec,
                               gateway::ModelGateway& gw, const IcaOptions& options) {
    if (options.runs < 1) throw Error(ErrorKind::ConfigError, "runs must be >= 1");

    const auto issue =
        preprocess::clean_issue(instance.issue_title, instance.issue_body, options.strip_rules);
    const std::string prompt = prompts::build_ica_prompt(issue, options.checklist, options.templates);

    std::vector<RunResult> results;
    for (int run = 0; run < options.runs; ++run) {
        gateway::CallContext ctx{instance.instance_id, Task::Ica, run, CallKind::Completion};
        RunResult result;
        result.run_index = run;
        result.task = Task::Ica;

        int seed_hint = options.seed + run;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const Completion completion = gw.complete(spec, prompt, seed_hint, ctx);
            result.raw_output = completion.text;
            try {
                const auto outcome = prompts::parse_ica_output(completion.text);
                result.score = outcome.score;
                result.rationale = outcome.rationale;
                result.candidate_solution = outcome.candidate_solution;
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
                result.candidate_solution = false;
                result.flags.push_back("unparseable");
            }
        }
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace swelabel::ica
