#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "swelabel/types.hpp"

namespace swelabel::gateway {

// Provenance attached to every logged call.
struct CallContext {
    std::string instance_id;
    Task task = Task::Ica;
    int run_index = 0;
    CallKind call_kind = CallKind::Completion;
};

// One raw backend attempt. Token counts of -1 mean the provider did not
// report usage and the gateway should approximate as ceil(bytes/4).
struct BackendReply {
    std::string text;
    long input_tokens = -1;
    long output_tokens = -1;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendReply complete_once(const ModelSpec& spec, const std::string& prompt,
                                       int seed_hint) = 0;
    virtual std::vector<double> embed_once(const ModelSpec& spec, const std::string& text) = 0;
    // Deterministic backends log latency 0 so runs stay byte-reproducible.
    virtual bool deterministic() const { return false; }
};

// Pure function of (prompt, seed_hint): emits a canned structured block
// whose score is hash mod 4, unless a fixture override maps the hash to a
// canned text. Embeddings are a 16-dim deterministic function of the text.
class StubBackend : public Backend {
public:
    StubBackend() = default;
    explicit StubBackend(std::map<std::uint64_t, std::string> fixture_overrides)
        : overrides_(std::move(fixture_overrides)) {}

    static std::uint64_t prompt_hash(const std::string& prompt, int seed_hint);
    static constexpr std::size_t kEmbeddingDim = 16;

    // Fixture override file: JSON object mapping 16-hex-digit hash -> text.
    static std::map<std::uint64_t, std::string> load_fixture(const std::filesystem::path& path);

    BackendReply complete_once(const ModelSpec& spec, const std::string& prompt,
                               int seed_hint) override;
    std::vector<double> embed_once(const ModelSpec& spec, const std::string& text) override;
    bool deterministic() const override { return true; }

private:
    std::map<std::uint64_t, std::string> overrides_;
};

// OpenAI-style chat-completion / embedding endpoints ({base}/chat/completions,
// {base}/embeddings) with bearer auth drawn from ModelSpec::api_key_env.
class HttpBackend : public Backend {
public:
    BackendReply complete_once(const ModelSpec& spec, const std::string& prompt,
                               int seed_hint) override;
    std::vector<double> embed_once(const ModelSpec& spec, const std::string& text) override;
};

// Append-only usage sink with serialized appends; optionally mirrors each
// record to a JSONL file.
class UsageLog {
public:
    void append(UsageRecord record);
    std::vector<UsageRecord> snapshot() const;
    void open_sink(const std::filesystem::path& path);
    void set_manifest(std::string manifest_hash);

private:
    mutable std::mutex mutex_;
    std::vector<UsageRecord> records_;
    std::ofstream sink_;
    std::string manifest_;
};

struct GatewayConfig {
    int retries = 3;
    std::vector<int> backoff_ms = {1000, 2000, 4000};
    // Injectable for tests; defaults to std::this_thread::sleep_for.
    std::function<void(int)> sleeper;
};

struct TaskUsageSummary {
    double input_tokens = 0.0;
    double output_tokens = 0.0;
    double latency_s = 0.0;
    long n_instances = 0;
};

// Medians over per-instance totals: records of one instance are summed
// across runs and aux calls first, then the median is taken across
// instances. Failed attempts count toward totals (they consumed tokens).
TaskUsageSummary usage_summary(const std::vector<UsageRecord>& log, Task task);

// Same, but sums every task's records per instance (combined projection).
TaskUsageSummary usage_summary_all(const std::vector<UsageRecord>& log);

class ModelGateway {
public:
    ModelGateway(std::shared_ptr<Backend> backend, GatewayConfig config, UsageLog* log);

    // Retries transient failures with exponential backoff; replies with
    // empty text are logged with a failure marker and retried. Context
    // overflows propagate immediately.
    Completion complete(const ModelSpec& spec, const std::string& prompt, int seed_hint,
                        const CallContext& ctx);

    EmbeddingVector embed(const ModelSpec& spec, const std::string& text, const CallContext& ctx);

    Backend& backend() { return *backend_; }

private:
    std::shared_ptr<Backend> backend_;
    GatewayConfig config_;
    UsageLog* log_;

    void sleep_ms(int ms) const;
};

long approx_tokens(std::size_t byte_length);

}  // namespace swelabel::gateway
