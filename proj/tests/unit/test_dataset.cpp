#include <doctest.h>

#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "swelabel/dataset.hpp"

using namespace swelabel;

TEST_CASE("load_instances keeps file order and parses the public column names") {
    testsupport::TempDir tmp("dataset");
    const std::string rows =
        R"({"instance_id":"a-1","repo":"owner/name","base_commit":"abc123f","problem_statement":"Title here\nBody line one.","patch":"","test_patch":"","FAIL_TO_PASS":"[\"t::one\"]","PASS_TO_PASS":[]})"
        "\n"
        R"({"instance_id":"a-2","repo":"owner/name","base_commit":"abc123f","issue_title":"T2","issue_body":"B2","custom_field":{"nested":true}})"
        "\n"
        R"({"instance_id":"a-3","issue_title":"T3"})"
        "\n";
    testsupport::write(tmp.path() / "d.jsonl", rows);

    const auto instances = dataset::load_instances(tmp.path() / "d.jsonl");
    REQUIRE(instances.size() == 3);
    CHECK(instances[0].instance_id == "a-1");
    CHECK(instances[0].issue_title == "Title here");
    CHECK(instances[0].issue_body == "Body line one.");
    CHECK(instances[0].fail_to_pass == std::vector<std::string>{"t::one"});
    CHECK(instances[1].issue_title == "T2");
    CHECK(instances[1].extras.count("custom_field") == 1);
    CHECK(instances[2].instance_id == "a-3");
}

TEST_CASE("empty file yields an empty list") {
    testsupport::TempDir tmp("dataset");
    testsupport::write(tmp.path() / "empty.jsonl", "");
    CHECK(dataset::load_instances(tmp.path() / "empty.jsonl").empty());
}

TEST_CASE("missing instance_id reports the line number") {
    try {
        dataset::parse_instances(R"({"repo":"x/y"})" "\n");
        FAIL("expected MalformedRecord");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedRecord);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("duplicate ids are rejected") {
    const std::string rows = R"({"instance_id":"dup"})" "\n" R"({"instance_id":"dup"})" "\n";
    try {
        dataset::parse_instances(rows);
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DuplicateId);
    }
}

TEST_CASE("bad base_commit is malformed") {
    CHECK_THROWS_AS(dataset::parse_instances(R"({"instance_id":"a","base_commit":"nothex!"})" "\n"),
                    Error);
    CHECK_THROWS_AS(dataset::parse_instances(R"({"instance_id":"a","base_commit":"ab12"})" "\n"),
                    Error);
}

namespace {

LabelRecord sample_record(const std::string& id, Task task, oracles::Rng& rng) {
    LabelRecord rec;
    rec.instance_id = id;
    rec.task = task;
    rec.model_id = "stub";
    rec.template_hash = "aabbccdd00112233";
    if (task == Task::Ica) rec.checklist_hash = "1122334455667788";
    rec.manifest = "ffeeddccbbaa9988";
    rec.timestamp = "1970-01-01T00:00:00Z";
    const int n = 1 + rng.below(4);
    std::vector<Score> valid;
    for (int i = 0; i < n; ++i) {
        RunResult run;
        run.run_index = i;
        run.task = task;
        if (rng.below(5)) {
            run.score = Score(rng.below(4));
            valid.push_back(*run.score);
        } else {
            run.flags.push_back("unparseable");
        }
        run.rationale = "reason " + std::to_string(rng.below(1000));
        if (task == Task::Ica) run.candidate_solution = rng.below(2) == 1;
        if (task == Task::Tca && run.score && run.score->value() > 0)
            run.counter_example = "counter " + std::to_string(rng.below(1000));
        run.raw_output = "raw\nmulti-line \"output\" \\ with escapes";
        rec.runs.push_back(run);
    }
    if (valid.empty()) {
        rec.runs[0].score = Score(1);
        rec.runs[0].flags.clear();
        valid.push_back(Score(1));
    }
    rec.consensus_score = valid.front();
    rec.binary_label =
        task == Task::Difficulty
            ? std::nullopt
            : std::optional<BinaryLabel>(valid.front().value() <= 1 ? BinaryLabel::Positive
                                                                    : BinaryLabel::Negative);
    rec.confidence = 1.0 / static_cast<double>(valid.size());
    rec.rule = rng.below(2) ? ConsensusRule::Majority : ConsensusRule::Median;
    rec.valid_run_count = static_cast<int>(valid.size());
    return rec;
}

}  // namespace

TEST_CASE("write_records then load_records is identity on structured fields") {
    testsupport::TempDir tmp("records");
    oracles::Rng rng(1);
    std::vector<LabelRecord> records;
    const Task tasks[] = {Task::Ica, Task::Tca, Task::Difficulty};
    for (int i = 0; i < 40; ++i)
        records.push_back(sample_record("inst-" + std::to_string(i), tasks[i % 3], rng));

    const auto path = tmp.path() / "records.jsonl";
    dataset::write_records(path, records);
    const auto loaded = dataset::load_records(path);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& a = records[i];
        const auto& b = loaded[i];
        CHECK(a.instance_id == b.instance_id);
        CHECK(a.task == b.task);
        CHECK(a.consensus_score == b.consensus_score);
        CHECK(a.binary_label == b.binary_label);
        CHECK(a.confidence == b.confidence);  // exact: shortest-round-trip floats
        CHECK(a.rule == b.rule);
        CHECK(a.valid_run_count == b.valid_run_count);
        CHECK(a.model_id == b.model_id);
        CHECK(a.template_hash == b.template_hash);
        CHECK(a.checklist_hash == b.checklist_hash);
        CHECK(a.manifest == b.manifest);
        CHECK(a.timestamp == b.timestamp);
        REQUIRE(a.runs.size() == b.runs.size());
        for (std::size_t r = 0; r < a.runs.size(); ++r) {
            CHECK(a.runs[r].run_index == b.runs[r].run_index);
            CHECK(a.runs[r].score == b.runs[r].score);
            CHECK(a.runs[r].rationale == b.runs[r].rationale);
            CHECK(a.runs[r].candidate_solution == b.runs[r].candidate_solution);
            CHECK(a.runs[r].counter_example == b.runs[r].counter_example);
            CHECK(a.runs[r].flags == b.runs[r].flags);
            CHECK(a.runs[r].raw_output == b.runs[r].raw_output);
        }
    }

    // Instance round trip through its serializer as well.
    Instance inst;
    inst.instance_id = "round";
    inst.repo = "o/n";
    inst.base_commit = "abcdef0123456789";
    inst.issue_title = "T";
    inst.issue_body = "B\nwith \"quotes\"";
    inst.extras["extra_int"] = "42";
    const auto line = dataset::serialize_instance(inst);
    const auto back = dataset::parse_instances(line + "\n");
    REQUIRE(back.size() == 1);
    CHECK(back[0].instance_id == inst.instance_id);
    CHECK(back[0].issue_body == inst.issue_body);
    CHECK(back[0].extras.at("extra_int") == "42");
}

TEST_CASE("write empty list produces an empty file") {
    testsupport::TempDir tmp("records");
    const auto path = tmp.path() / "empty.jsonl";
    dataset::write_records(path, {});
    CHECK(util::read_file(path).empty());
}

TEST_CASE("unwritable path raises IoError") {
    try {
        dataset::write_records("/nonexistent-dir/sub/records.jsonl", {});
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IoError);
    }
}

TEST_CASE("usage records round trip") {
    testsupport::TempDir tmp("usage");
    UsageRecord u;
    u.instance_id = "i";
    u.task = Task::Tca;
    u.run_index = 2;
    u.model_id = "stub";
    u.input_tokens = 123;
    u.output_tokens = 45;
    u.latency_s = 0.5;
    u.call_kind = CallKind::AuxParse;
    u.approximate = true;
    const auto path = tmp.path() / "usage.jsonl";
    dataset::append_usage(path, {u});
    dataset::append_usage(path, {u});  // append, not truncate
    const auto loaded = dataset::load_usage(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[1].call_kind == CallKind::AuxParse);
    CHECK(loaded[1].input_tokens == 123);
    CHECK(loaded[1].approximate);
}
