#include "swelabel/pipeline.hpp"

#include <atomic>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "swelabel/consensus.hpp"
#include "swelabel/dataset.hpp"
#include "swelabel/evalkit.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::pipeline {

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(const LabelJobConfig& config) {
    json snapshot;
    snapshot["dataset"] = config.dataset.string();
    json tasks = json::array();
    for (Task t : config.tasks) tasks.push_back(to_string(t));
    snapshot["tasks"] = tasks;
    snapshot["model"] = {{"model_id", config.model.model_id},
                         {"temperature", config.model.temperature},
                         {"max_output_tokens", config.model.max_output_tokens},
                         {"endpoint", config.model.endpoint},
                         {"context_tokens", config.model.context_tokens}};
    snapshot["aux_model"] = {{"model_id", config.aux_model.model_id},
                             {"endpoint", config.aux_model.endpoint}};
    snapshot["runs"] = config.runs;
    snapshot["seed"] = config.seed;
    snapshot["map_budget"] = config.map_budget;
    snapshot["template_hashes"] = {{"ica", config.templates.hash(Task::Ica)},
                                   {"tca", config.templates.hash(Task::Tca)},
                                   {"difficulty", config.templates.hash(Task::Difficulty)}};
    snapshot["checklist_hash"] = prompts::checklist_hash(config.checklist);
    snapshot["strip_rules_hash"] = preprocess::rules_hash(config.strip_rules);
    snapshot["out_dir"] = config.out_dir.string();

    RunManifest manifest;
    manifest.config_json = snapshot.dump();
    manifest.hash = util::hex64(util::fnv1a64(manifest.config_json));
    manifest.started_at = utc_timestamp();
    return manifest;
}

LabelRecord make_label_record(const Instance& instance, Task task,
                              const std::vector<RunResult>& runs, const LabelJobConfig& config,
                              const RunManifest& manifest, bool deterministic_clock) {
    LabelRecord record;
    record.instance_id = instance.instance_id;
    record.task = task;
    record.runs = runs;
    record.model_id = config.model.model_id;
    record.template_hash = config.templates.hash(task);
    if (task == Task::Ica) record.checklist_hash = prompts::checklist_hash(config.checklist);
    record.manifest = manifest.hash;
    record.timestamp = deterministic_clock ? "1970-01-01T00:00:00Z" : utc_timestamp();

    std::vector<Score> valid;
    for (const auto& run : runs)
        if (run.score) valid.push_back(*run.score);
    const auto consensus = consensus::aggregate(valid);  // throws NoValidRuns when empty
    record.consensus_score = consensus.consensus_score;
    record.confidence = consensus.confidence;
    record.rule = consensus.rule_applied;
    record.valid_run_count = consensus.valid_run_count;
    // Difficulty carries no binary discretization; ICA/TCA do.
    if (task != Task::Difficulty) record.binary_label = consensus.binary_label;
    return record;
}

namespace {

struct WorkUnit {
    std::size_t order = 0;
    Instance instance;
    Task task = Task::Ica;
};

}  // namespace

LabelJobResult run_label_job(const LabelJobConfig& config) {
    LabelJobResult result;
    const auto instances = dataset::load_instances(config.dataset);

    std::filesystem::create_directories(config.out_dir);
    result.records_path = config.out_dir / "records.jsonl";
    result.usage_path = config.out_dir / "usage.jsonl";
    result.manifest_path = config.out_dir / "manifest.json";

    RunManifest manifest = make_manifest(config);

    // Resume by (instance_id, task).
    std::set<std::pair<std::string, std::string>> done;
    if (std::filesystem::exists(result.records_path)) {
        for (const auto& rec : dataset::load_records(result.records_path))
            done.insert({rec.instance_id, to_string(rec.task)});
    }

    std::vector<WorkUnit> units;
    for (const auto& instance : instances) {
        for (Task task : config.tasks) {
            if (done.count({instance.instance_id, to_string(task)})) {
                ++result.skipped;
                continue;
            }
            units.push_back({units.size(), instance, task});
        }
    }

    auto backend = config.backend ? config.backend : std::make_shared<gateway::StubBackend>();
    const bool deterministic_clock = backend->deterministic();
    gateway::UsageLog usage_log;
    usage_log.set_manifest(manifest.hash);
    usage_log.open_sink(result.usage_path);
    gateway::ModelGateway gw(backend, config.gateway, &usage_log);
    repomap::RepoMapBuilder builder;

    ica::IcaOptions ica_options;
    ica_options.runs = config.runs;
    ica_options.seed = config.seed;
    ica_options.templates = config.templates;
    ica_options.checklist = config.checklist;
    ica_options.strip_rules = config.strip_rules;

    tca::TcaOptions tca_options;
    tca_options.runs = config.runs;
    tca_options.seed = config.seed;
    tca_options.map_budget = config.map_budget;
    tca_options.templates = config.templates;
    tca_options.strip_rules = config.strip_rules;

    std::ofstream records_out(result.records_path, std::ios::binary | std::ios::app);
    if (!records_out) throw errors::io("cannot open " + result.records_path.string());

    std::mutex mutex;
    std::condition_variable cv;
    std::map<std::size_t, std::optional<LabelRecord>> finished;  // nullopt = failed unit
    std::size_t next_to_write = 0;
    std::atomic<std::size_t> next_unit{0};

    auto flush_ready = [&]() {
        // Caller holds the lock. Emit in dataset order for reproducibility
        // and crash-resilient prefixes.
        while (true) {
            auto it = finished.find(next_to_write);
            if (it == finished.end()) break;
            if (it->second) {
                records_out << dataset::serialize_record(*it->second) << '\n';
                records_out.flush();
                ++result.labeled;
            }
            finished.erase(it);
            ++next_to_write;
        }
    };

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next_unit.fetch_add(1);
            if (i >= units.size()) break;
            const WorkUnit& unit = units[i];
            std::optional<LabelRecord> record;
            try {
                if (unit.instance.issue_title.size() + unit.instance.issue_body.size() > 20000) {
                    std::lock_guard<std::mutex> lock(mutex);
                    std::cerr << "note: oversized issue text on " << unit.instance.instance_id
                              << " (> 20000 chars)\n";
                }
                std::vector<RunResult> runs;
                switch (unit.task) {
                    case Task::Ica:
                        runs = ica::run_ica(unit.instance, config.model, gw, ica_options);
                        break;
                    case Task::Tca:
                        runs = tca::run_tca(unit.instance, config.model, config.aux_model, gw,
                                            builder, config.git, tca_options);
                        break;
                    case Task::Difficulty:
                        runs = tca::run_difficulty(unit.instance, config.model, config.aux_model,
                                                   gw, builder, config.git, tca_options);
                        break;
                }
                record = make_label_record(unit.instance, unit.task, runs, config, manifest,
                                           deterministic_clock);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mutex);
                result.errors.push_back(unit.instance.instance_id + "/" + to_string(unit.task) +
                                        ": " + e.what());
                ++result.failed;
            }
            {
                std::lock_guard<std::mutex> lock(mutex);
                finished[unit.order] = std::move(record);
                flush_ready();
            }
            cv.notify_all();
        }
    };

    const int n_workers = std::max(1, std::min<int>(config.parallel, static_cast<int>(units.size())));
    std::vector<std::thread> workers;
    for (int i = 0; i < n_workers; ++i) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
    {
        std::lock_guard<std::mutex> lock(mutex);
        flush_ready();
    }

    manifest.finished_at = utc_timestamp();
    json mj;
    mj["hash"] = manifest.hash;
    mj["config"] = json::parse(manifest.config_json);
    mj["started_at"] = manifest.started_at;
    mj["finished_at"] = manifest.finished_at;
    mj["labeled"] = result.labeled;
    mj["skipped"] = result.skipped;
    mj["failed"] = result.failed;
    json totals;
    for (Task task : config.tasks) {
        long in = 0, out = 0;
        for (const auto& rec : usage_log.snapshot()) {
            if (rec.task != task) continue;
            in += rec.input_tokens;
            out += rec.output_tokens;
        }
        totals[to_string(task)] = {{"input_tokens", in}, {"output_tokens", out}};
    }
    mj["usage_totals"] = totals;
    util::write_file(result.manifest_path, mj.dump(2) + "\n");
    return result;
}

SimilarityReport similarity_report(const std::vector<LabelRecord>& records,
                                   const std::filesystem::path& human_file,
                                   gateway::ModelGateway& gw, const ModelSpec& embed_spec) {
    // instance -> human seat rationales
    std::map<std::string, std::vector<std::string>> human;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(util::read_file(human_file))) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("instance_id") || !j.contains("rationales"))
            throw errors::malformed_record(line_no, "expected {instance_id, rationales}");
        human[j["instance_id"].get<std::string>()] =
            j["rationales"].get<std::vector<std::string>>();
    }

    SimilarityReport report;
    std::vector<std::vector<double>> seat_values;  // [seat][instance]
    std::vector<double> corpus_values;
    std::vector<double> human_words, run_words;

    for (const auto& rec : records) {
        auto it = human.find(rec.instance_id);
        if (it == human.end()) continue;
        const auto& seats = it->second;

        std::vector<std::string> run_texts;
        for (const auto& run : rec.runs) run_texts.push_back(run.rationale);

        const std::size_t n_pairs = std::min(seats.size(), run_texts.size());
        if (seat_values.size() < n_pairs) seat_values.resize(n_pairs);
        gateway::CallContext ctx{rec.instance_id, rec.task, 0, CallKind::Embedding};
        for (std::size_t s = 0; s < n_pairs; ++s) {
            if (util::trim(seats[s]).empty() || util::trim(run_texts[s]).empty()) continue;
            const auto eh = gw.embed(embed_spec, seats[s], ctx);
            const auto er = gw.embed(embed_spec, run_texts[s], ctx);
            seat_values[s].push_back(evalkit::cosine(eh, er));
        }
        try {
            const auto combined_human = evalkit::combine_rationales(seats);
            const auto combined_runs = evalkit::combine_rationales(run_texts);
            const auto eh = gw.embed(embed_spec, combined_human, ctx);
            const auto er = gw.embed(embed_spec, combined_runs, ctx);
            corpus_values.push_back(evalkit::cosine(eh, er));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::AllEmpty) throw;
        }
        for (const auto& s : seats) human_words.push_back(static_cast<double>(evalkit::word_count(s)));
        for (const auto& r : run_texts) run_words.push_back(static_cast<double>(evalkit::word_count(r)));
        ++report.n_instances;
    }

    if (corpus_values.empty()) throw Error(ErrorKind::EmptyIntersection, "no overlapping instances");
    for (auto& seat : seat_values)
        report.seat_medians.push_back(seat.empty() ? 0.0 : util::median(seat));
    report.corpus_median = util::median(corpus_values);
    report.human_word_median = human_words.empty() ? 0.0 : util::median(human_words);
    report.run_word_median = run_words.empty() ? 0.0 : util::median(run_words);
    return report;
}

}  // namespace swelabel::pipeline
