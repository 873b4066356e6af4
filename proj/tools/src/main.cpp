#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "swelabel/agreement.hpp"
#include "swelabel/consensus.hpp"
#include "swelabel/costkit.hpp"
#include "swelabel/dataset.hpp"
#include "swelabel/evalkit.hpp"
#include "swelabel/pipeline.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;
using namespace swelabel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDataset = 2;

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::IoError:
        case ErrorKind::MalformedRecord:
        case ErrorKind::DuplicateId:
            return kExitDataset;
        default:
            return kExitConfig;
    }
}

std::vector<Task> parse_tasks(const std::string& task_arg) {
    if (task_arg == "all") return {Task::Ica, Task::Tca, Task::Difficulty};
    return {task_from_string(task_arg)};
}

std::shared_ptr<gateway::Backend> make_backend(const ModelSpec& spec,
                                               const std::string& stub_fixture) {
    if (spec.endpoint == "stub" || spec.model_id == "stub") {
        if (!stub_fixture.empty())
            return std::make_shared<gateway::StubBackend>(
                gateway::StubBackend::load_fixture(stub_fixture));
        return std::make_shared<gateway::StubBackend>();
    }
    return std::make_shared<gateway::HttpBackend>();
}

std::map<std::string, BinaryLabel> labels_from_records(const std::vector<LabelRecord>& records,
                                                       Task task) {
    std::map<std::string, BinaryLabel> out;
    for (const auto& rec : records) {
        if (rec.task != task || !rec.binary_label) continue;
        out[rec.instance_id] = *rec.binary_label;
    }
    return out;
}

// Reference labels: JSONL rows {"instance_id", "task", "label"} or
// {"instance_id", "task", "scores": [a, b, c]} (majority of three).
std::map<std::string, BinaryLabel> load_reference(const std::filesystem::path& path, Task task) {
    std::map<std::string, BinaryLabel> out;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(path))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("instance_id"))
            throw errors::malformed_record(line_no, "expected {instance_id, ...}");
        if (j.contains("task") && task_from_string(j["task"].get<std::string>()) != task) continue;
        const std::string id = j["instance_id"].get<std::string>();
        if (j.contains("scores")) {
            const auto scores = j["scores"].get<std::vector<int>>();
            if (scores.size() != 3) throw errors::malformed_record(line_no, "need exactly 3 scores");
            out[id] = evalkit::majority_reference(
                {Score(scores[0]), Score(scores[1]), Score(scores[2])});
        } else if (j.contains("label")) {
            const auto label = binary_label_from_name(j["label"].get<std::string>());
            if (!label) throw errors::malformed_record(line_no, "unknown label");
            out[id] = *label;
        } else {
            throw errors::malformed_record(line_no, "expected 'label' or 'scores'");
        }
    }
    return out;
}

std::string percent1(double fraction) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1) << fraction * 100.0;
    return ss.str();
}

// ---------------------------------------------------------------------------

int cmd_label(const std::filesystem::path& dataset, const std::string& task_arg,
              ModelSpec model, ModelSpec aux, int runs, int seed, long map_budget, int parallel,
              const std::filesystem::path& out_dir, const std::filesystem::path& cache_dir,
              const std::filesystem::path& mirror_dir, const std::string& stub_fixture,
              const std::string& templates_dir, const std::string& checklist_file,
              const std::string& strip_rules_file) {
    pipeline::LabelJobConfig config;
    config.dataset = dataset;
    config.tasks = parse_tasks(task_arg);
    config.model = std::move(model);
    config.aux_model = std::move(aux);
    config.runs = runs;
    config.seed = seed;
    config.map_budget = map_budget;
    config.parallel = parallel;
    config.out_dir = out_dir;
    config.git.cache_dir = cache_dir;
    config.git.mirror_dir = mirror_dir;
    if (!templates_dir.empty()) config.templates = prompts::Templates::load_dir(templates_dir);
    if (!checklist_file.empty()) config.checklist = prompts::load_checklist(checklist_file);
    if (!strip_rules_file.empty()) config.strip_rules = preprocess::load_rules(strip_rules_file);
    config.backend = make_backend(config.model, stub_fixture);

    const auto result = pipeline::run_label_job(config);
    std::cout << "labeled " << result.labeled << ", skipped " << result.skipped << " (resume), failed "
              << result.failed << "\n"
              << "records:  " << result.records_path.string() << "\n"
              << "usage:    " << result.usage_path.string() << "\n"
              << "manifest: " << result.manifest_path.string() << "\n";
    for (const auto& err : result.errors) std::cerr << "error: " << err << "\n";
    if (result.failed > 0 && result.labeled == 0 && result.skipped == 0) return kExitConfig;
    return kExitOk;
}

int cmd_eval_accuracy(const std::filesystem::path& pred_path, const std::filesystem::path& ref_path,
                      const std::string& task_arg, const std::filesystem::path& dataset_path,
                      const std::string& json_out) {
    const auto records = dataset::load_records(pred_path);
    const std::vector<Task> tasks =
        task_arg.empty() ? std::vector<Task>{Task::Ica, Task::Tca} : parse_tasks(task_arg);

    std::map<std::string, std::string> project_of;  // instance -> repo
    if (!dataset_path.empty())
        for (const auto& inst : dataset::load_instances(dataset_path))
            project_of[inst.instance_id] = inst.repo;

    std::set<std::string> models;
    for (const auto& rec : records) models.insert(rec.model_id);

    json machine = json::array();
    std::cout << std::left << std::setw(24) << "Model";
    for (Task t : tasks) std::cout << std::right << std::setw(20) << (std::string(to_string(t)) + " acc (%)");
    std::cout << "\n";
    for (const auto& model : models) {
        std::cout << std::left << std::setw(24) << model;
        for (Task task : tasks) {
            std::vector<LabelRecord> subset;
            for (const auto& rec : records)
                if (rec.model_id == model) subset.push_back(rec);
            const auto pred = labels_from_records(subset, task);
            const auto ref = load_reference(ref_path, task);
            std::string cell = "--";
            if (!pred.empty()) {
                try {
                    const double acc = evalkit::accuracy(pred, ref);
                    cell = percent1(acc);
                    machine.push_back({{"model_id", model},
                                       {"task", to_string(task)},
                                       {"accuracy", acc},
                                       {"n", static_cast<long>([&] {
                                            long n = 0;
                                            for (const auto& [id, l] : pred)
                                                if (ref.count(id)) ++n;
                                            return n;
                                        }())}});
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::EmptyIntersection) throw;
                }
            }
            std::cout << std::right << std::setw(20) << cell;
        }
        std::cout << "\n";
    }

    // Per-project breakdown over all records of each task.
    if (!project_of.empty()) {
        for (Task task : tasks) {
            const auto pred = labels_from_records(records, task);
            const auto ref = load_reference(ref_path, task);
            std::map<std::string, std::pair<long, long>> per_project;  // equal, total
            for (const auto& [id, label] : pred) {
                auto it = ref.find(id);
                if (it == ref.end()) continue;
                auto& [equal, total] = per_project[project_of.count(id) ? project_of.at(id) : "?"];
                ++total;
                if (label == it->second) ++equal;
            }
            if (per_project.empty()) continue;
            std::cout << "\nper-project accuracy (" << to_string(task) << "):\n";
            for (const auto& [project, counts] : per_project)
                std::cout << "  " << std::left << std::setw(30) << project
                          << percent1(static_cast<double>(counts.first) /
                                      static_cast<double>(counts.second))
                          << "  (" << counts.first << "/" << counts.second << ")\n";
        }
    }

    if (!json_out.empty()) util::write_file(json_out, machine.dump(2) + "\n");
    return kExitOk;
}

int cmd_eval_agreement(const std::filesystem::path& records_path, const std::string& task_arg,
                       const std::string& matrix_path, const std::string& metric_name) {
    agreement::AgreementReport report;
    if (!matrix_path.empty()) {
        const auto matrix =
            agreement::load_matrix(matrix_path, agreement::metric_from_string(metric_name));
        report = agreement::report(matrix);
    } else {
        const Task task = task_from_string(task_arg);
        std::vector<LabelRecord> subset;
        for (const auto& rec : dataset::load_records(records_path))
            if (rec.task == task) subset.push_back(rec);
        report = agreement::run_agreement(subset);
    }
    std::cout << std::fixed << std::setprecision(4) << "alpha: " << report.alpha << "\nband: "
              << agreement::to_string(report.band)
              << "\npairable values: " << report.n_pairable_values << "\n";
    return kExitOk;
}

int cmd_eval_similarity(const std::filesystem::path& records_path,
                        const std::filesystem::path& human_path, const std::string& task_arg,
                        const std::string& embed_model) {
    const Task task = task_from_string(task_arg);
    std::vector<LabelRecord> subset;
    for (const auto& rec : dataset::load_records(records_path))
        if (rec.task == task) subset.push_back(rec);

    ModelSpec embed_spec;
    embed_spec.model_id = embed_model;
    auto backend = make_backend(embed_spec, "");
    gateway::UsageLog log;
    gateway::ModelGateway gw(backend, {}, &log);

    const auto report = pipeline::similarity_report(subset, human_path, gw, embed_spec);
    std::cout << std::fixed << std::setprecision(3);
    for (std::size_t i = 0; i < report.seat_medians.size(); ++i)
        std::cout << "seat L" << (i + 1) << " median similarity: " << report.seat_medians[i] << "\n";
    std::cout << "corpus median similarity: " << report.corpus_median << "\n"
              << "human median word count: " << report.human_word_median << "\n"
              << "model median word count: " << report.run_word_median << "\n"
              << "instances compared: " << report.n_instances << "\n";
    return kExitOk;
}

int cmd_eval_scaffold(const std::vector<std::string>& dirs_args, const std::filesystem::path& labels,
                      const std::string& task_arg, const std::string& results_file,
                      const std::string& json_out) {
    // --dirs takes scaffold directories, or one parent whose subdirectories
    // are the scaffolds.
    std::vector<std::filesystem::path> dirs;
    for (const auto& arg : dirs_args)
        for (const auto& piece : util::split(arg, ','))
            if (!piece.empty()) dirs.emplace_back(piece);
    if (dirs.size() == 1 && std::filesystem::is_directory(dirs[0]) &&
        !std::filesystem::exists(dirs[0] / results_file)) {
        std::vector<std::filesystem::path> subdirs;
        for (const auto& entry : std::filesystem::directory_iterator(dirs[0]))
            if (entry.is_directory()) subdirs.push_back(entry.path());
        std::sort(subdirs.begin(), subdirs.end());
        dirs = std::move(subdirs);
    }

    const Task task = task_from_string(task_arg);
    const auto records = dataset::load_records(labels);
    std::vector<std::string> ids;
    std::map<std::string, BinaryLabel> label_of;
    for (const auto& rec : records) {
        if (rec.task != task || !rec.binary_label) continue;
        ids.push_back(rec.instance_id);
        label_of[rec.instance_id] = *rec.binary_label;
    }
    const auto rates = evalkit::resolution_rates(dirs, ids, results_file);

    std::vector<double> positive, negative;
    for (const auto& r : rates) {
        if (label_of.at(r.instance_id) == BinaryLabel::Positive)
            positive.push_back(r.rate);
        else
            negative.push_back(r.rate);
    }

    std::cout << "resolution rates over " << dirs.size() << " scaffolds, " << rates.size()
              << " instances\n";
    std::cout << std::fixed << std::setprecision(2);
    std::cout << binary_label_name(task, BinaryLabel::Positive) << ": n = " << positive.size();
    if (!positive.empty()) std::cout << ", median = " << util::median(positive);
    std::cout << "\n" << binary_label_name(task, BinaryLabel::Negative) << ": n = " << negative.size();
    if (!negative.empty()) std::cout << ", median = " << util::median(negative);
    std::cout << "\n";

    json machine;
    machine["rates"] = json::array();
    for (const auto& r : rates)
        machine["rates"].push_back({{"instance_id", r.instance_id},
                                    {"resolved", r.resolved_count},
                                    {"scaffolds", r.scaffold_count},
                                    {"rate", r.rate}});

    if (positive.size() >= 2 && negative.size() >= 2) {
        try {
            const auto anova = evalkit::anova_oneway({positive, negative});
            std::cout << "one-way ANOVA: F = " << std::setprecision(1) << anova.f_stat
                      << ", df = (" << anova.df_between << ", " << anova.df_within << ")"
                      << ", p = " << std::setprecision(2) << anova.p_value << "\n";
            machine["anova"] = {{"f", anova.f_stat},
                                {"df_between", anova.df_between},
                                {"df_within", anova.df_within},
                                {"p", anova.p_value}};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateGroups) throw;
            std::cout << "one-way ANOVA skipped: " << e.what() << "\n";
        }
    } else {
        std::cout << "one-way ANOVA skipped: need two groups with >= 2 instances each\n";
    }
    if (!json_out.empty()) util::write_file(json_out, machine.dump(2) + "\n");
    return kExitOk;
}

int cmd_cost(const std::string& usage_path, const std::string& pricing, long n,
             const std::vector<std::string>& models, double in_tokens, double out_tokens,
             const std::string& json_out) {
    const auto profile = costkit::resolve_pricing(pricing);

    double in_per_instance = in_tokens, out_per_instance = out_tokens;
    if (!usage_path.empty()) {
        const auto log = dataset::load_usage(usage_path);
        const auto summary = gateway::usage_summary_all(log);
        in_per_instance = summary.input_tokens;
        out_per_instance = summary.output_tokens;
    }
    if (in_per_instance < 0 || out_per_instance < 0)
        throw Error(ErrorKind::ConfigError, "need --usage or both --in-tokens/--out-tokens");

    const auto table = costkit::build_cost_table(in_per_instance, out_per_instance, profile, n, models);
    std::cout << costkit::render_cost_table(table);

    if (!json_out.empty()) {
        json machine;
        machine["n_instances"] = table.n_instances;
        machine["input_tokens_per_instance"] = table.input_tokens_per_instance;
        machine["output_tokens_per_instance"] = table.output_tokens_per_instance;
        machine["rows"] = json::array();
        for (const auto& row : table.rows)
            machine["rows"].push_back({{"model_id", row.model_id},
                                       {"input_cost", row.input_cost},
                                       {"output_cost", row.output_cost},
                                       {"total", row.total}});
        util::write_file(json_out, machine.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_repomap(const std::filesystem::path& repo, long budget, const std::string& focus_arg,
                const std::string& mentions_arg, const std::string& commit,
                const std::filesystem::path& cache_dir, const std::filesystem::path& mirror_dir) {
    Workspace ws;
    if (!commit.empty()) {
        Instance pseudo;
        pseudo.instance_id = "repomap";
        pseudo.repo = repo.string();
        pseudo.base_commit = commit;
        workspace::GitConfig git;
        git.cache_dir = cache_dir;
        git.mirror_dir = mirror_dir;
        ws = workspace::checkout_workspace(pseudo, git);
    } else {
        ws = workspace::from_dir(repo);
    }

    std::set<std::string> focus, mentions;
    for (const auto& f : util::split(focus_arg, ','))
        if (!f.empty()) focus.insert(f);
    for (const auto& m : util::split(mentions_arg, ','))
        if (!m.empty()) mentions.insert(m);

    repomap::RepoMapBuilder builder;
    const auto map = builder.build(ws, focus, mentions, budget);
    std::cout << map.text;
    std::cerr << "symbols: " << map.included_symbols.size() << ", tokens: " << map.token_estimate
              << "/" << map.budget << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch labeling of SWE-bench-style instances for issue clarity, test coverage, "
                 "and difficulty, with consensus, agreement analytics, and cost projection"};
    app.require_subcommand(1);

    // --- label ---
    auto* label = app.add_subcommand("label", "Run labeling pipelines over a dataset");
    std::filesystem::path dataset, out_dir = "out", cache_dir = "cache", mirror_dir;
    std::string task_arg = "ica", stub_fixture, templates_dir, checklist_file, strip_rules_file;
    ModelSpec model;
    model.model_id = "stub";
    ModelSpec aux;
    aux.model_id = "gpt-4o-mini";
    aux.endpoint = "stub";
    int runs = 3, seed = 0, parallel = 4;
    long map_budget = 1024;
    label->add_option("--dataset", dataset, "Line-delimited instance records")->required();
    label->add_option("--task", task_arg, "ica|tca|difficulty|all")->default_val("ica");
    label->add_option("--model", model.model_id, "Model id, or 'stub'");
    label->add_option("--endpoint", model.endpoint, "Chat endpoint base URL, or 'stub'");
    label->add_option("--api-key-env", model.api_key_env, "Env var holding the API key");
    label->add_option("--temperature", model.temperature, "Sampling temperature");
    label->add_option("--max-output-tokens", model.max_output_tokens, "Completion token cap");
    label->add_option("--context-tokens", model.context_tokens, "Model context limit (tokens)");
    label->add_option("--aux-model", aux.model_id, "Auxiliary score-extraction model");
    label->add_option("--aux-endpoint", aux.endpoint, "Auxiliary endpoint, or 'stub'");
    label->add_option("--runs", runs, "Stochastic runs per instance");
    label->add_option("--seed", seed, "Base seed hint");
    label->add_option("--map-budget", map_budget, "Repo-map token budget");
    label->add_option("--parallel", parallel, "Worker count");
    label->add_option("--out", out_dir, "Output directory")->required();
    label->add_option("--cache", cache_dir, "Workspace cache directory");
    label->add_option("--mirror", mirror_dir, "Local git mirror directory");
    label->add_option("--stub-fixture", stub_fixture, "Stub override file (hash -> text)");
    label->add_option("--templates", templates_dir, "Prompt template directory");
    label->add_option("--checklist", checklist_file, "Checklist file (one criterion per line)");
    label->add_option("--strip-rules", strip_rules_file, "Markdown strip-rule file");

    // --- eval ---
    auto* eval = app.add_subcommand("eval", "Evaluation procedures");
    eval->require_subcommand(1);

    auto* eval_acc = eval->add_subcommand("accuracy", "Accuracy against reference labels");
    std::filesystem::path pred_path, ref_path, eval_dataset;
    std::string eval_task, json_out;
    eval_acc->add_option("--pred", pred_path, "Predicted label records")->required();
    eval_acc->add_option("--ref", ref_path, "Reference labels (label or 3-score rows)")->required();
    eval_acc->add_option("--task", eval_task, "Restrict to one task");
    eval_acc->add_option("--dataset", eval_dataset, "Dataset for per-project breakdown");
    eval_acc->add_option("--json-out", json_out, "Machine-readable output path");

    auto* eval_agree = eval->add_subcommand("agreement", "Krippendorff's alpha across runs");
    std::filesystem::path agree_records;
    std::string agree_task = "tca", matrix_path, metric_name = "nominal";
    eval_agree->add_option("--records", agree_records, "Label records");
    eval_agree->add_option("--task", agree_task, "ica|tca|difficulty");
    eval_agree->add_option("--matrix", matrix_path, "Raw reliability matrix (unit-per-line)");
    eval_agree->add_option("--metric", metric_name, "nominal|ordinal|interval");

    auto* eval_sim = eval->add_subcommand("similarity", "Rationale similarity vs human seats");
    std::filesystem::path sim_records, human_path;
    std::string sim_task = "ica", embed_model = "stub";
    eval_sim->add_option("--records", sim_records, "Label records")->required();
    eval_sim->add_option("--human", human_path, "Human rationales (instance_id + rationales)")
        ->required();
    eval_sim->add_option("--task", sim_task, "ica|tca|difficulty");
    eval_sim->add_option("--embed-model", embed_model, "Embedding model id, or 'stub'");

    auto* eval_scaffold = eval->add_subcommand("scaffold", "Resolution rates and ANOVA");
    std::vector<std::string> dirs_args;
    std::filesystem::path labels_path;
    std::string scaffold_task = "tca", results_file = "results/results.json", scaffold_json;
    eval_scaffold->add_option("--dirs", dirs_args, "Scaffold dirs (or one parent dir)")->required();
    eval_scaffold->add_option("--labels", labels_path, "Label records")->required();
    eval_scaffold->add_option("--task", scaffold_task, "Grouping task (default tca)");
    eval_scaffold->add_option("--results-file", results_file, "Per-scaffold resolved list path");
    eval_scaffold->add_option("--json-out", scaffold_json, "Machine-readable output path");

    // --- cost ---
    auto* cost = app.add_subcommand("cost", "Project labeling cost from usage medians");
    std::string usage_path, pricing = "table2", cost_json;
    std::vector<std::string> cost_models;
    long n_instances = 1000;
    double in_tokens = -1, out_tokens = -1;
    cost->add_option("--usage", usage_path, "Usage log (per-call records)");
    cost->add_option("--pricing", pricing, "Pricing profile name or file");
    cost->add_option("--n", n_instances, "Instance count to project");
    cost->add_option("--models", cost_models, "Restrict to these model ids");
    cost->add_option("--in-tokens", in_tokens, "Median input tokens per instance");
    cost->add_option("--out-tokens", out_tokens, "Median output tokens per instance");
    cost->add_option("--json-out", cost_json, "Machine-readable output path");

    // --- repomap ---
    auto* repomap_cmd = app.add_subcommand("repomap", "Render a repository map for inspection");
    std::filesystem::path repo_path, rm_cache = "cache", rm_mirror;
    std::string focus_arg, mentions_arg, commit;
    long budget = 1024;
    repomap_cmd->add_option("--repo", repo_path, "Repository path (worktree or clone source)")
        ->required();
    repomap_cmd->add_option("--budget", budget, "Token budget");
    repomap_cmd->add_option("--focus", focus_arg, "Comma-separated focus files");
    repomap_cmd->add_option("--mentions", mentions_arg, "Comma-separated mentioned identifiers");
    repomap_cmd->add_option("--commit", commit, "Checkout this commit via the cache first");
    repomap_cmd->add_option("--cache", rm_cache, "Workspace cache directory");
    repomap_cmd->add_option("--mirror", rm_mirror, "Local git mirror directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*label)
            return cmd_label(dataset, task_arg, model, aux, runs, seed, map_budget, parallel,
                             out_dir, cache_dir, mirror_dir, stub_fixture, templates_dir,
                             checklist_file, strip_rules_file);
        if (*eval_acc)
            return cmd_eval_accuracy(pred_path, ref_path, eval_task, eval_dataset, json_out);
        if (*eval_agree)
            return cmd_eval_agreement(agree_records, agree_task, matrix_path, metric_name);
        if (*eval_sim) return cmd_eval_similarity(sim_records, human_path, sim_task, embed_model);
        if (*eval_scaffold)
            return cmd_eval_scaffold(dirs_args, labels_path, scaffold_task, results_file,
                                     scaffold_json);
        if (*cost)
            return cmd_cost(usage_path, pricing, n_instances, cost_models, in_tokens, out_tokens,
                            cost_json);
        if (*repomap_cmd)
            return cmd_repomap(repo_path, budget, focus_arg, mentions_arg, commit, rm_cache,
                               rm_mirror);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
