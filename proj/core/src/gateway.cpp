#include "swelabel/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "swelabel/dataset.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::gateway {

long approx_tokens(std::size_t byte_length) {
    return static_cast<long>((byte_length + 3) / 4);
}

// ---------------------------------------------------------------------------
// StubBackend

std::uint64_t StubBackend::prompt_hash(const std::string& prompt, int seed_hint) {
    return util::fnv1a64(prompt + '\x1f' + std::to_string(seed_hint));
}

std::map<std::uint64_t, std::string> StubBackend::load_fixture(const std::filesystem::path& path) {
    json j = json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorKind::ConfigError, "stub fixture must be a JSON object: " + path.string());
    std::map<std::uint64_t, std::string> out;
    for (const auto& [key, value] : j.items())
        out[std::stoull(key, nullptr, 16)] = value.get<std::string>();
    return out;
}

BackendReply StubBackend::complete_once(const ModelSpec&, const std::string& prompt, int seed_hint) {
    const std::uint64_t h = prompt_hash(prompt, seed_hint);
    auto it = overrides_.find(h);
    if (it != overrides_.end()) return {it->second, -1, -1};

    const int score = static_cast<int>(h % 4);
    const bool candidate = ((h >> 8) & 1) != 0;
    const std::string hex = util::hex64(h);
    std::string text = "```\nSCORE: " + std::to_string(score) +
                       "\nRATIONALE: Deterministic stub assessment " + hex +
                       ". The signal was weighed consistently across criteria." +
                       "\nCANDIDATE_SOLUTION: " + (candidate ? "yes" : "no");
    if (score > 0)
        text += "\nCOUNTER_EXAMPLE: A plausible alternative change (variant " +
                std::to_string(h % 7) + ") that the provided tests would not detect.";
    text += "\n```\n";
    return {text, -1, -1};
}

std::vector<double> StubBackend::embed_once(const ModelSpec&, const std::string& text) {
    std::uint64_t state = util::fnv1a64(text);
    std::vector<double> values(kEmbeddingDim);
    for (auto& v : values) {
        const std::uint64_t bits = util::splitmix64(state);
        v = static_cast<double>(bits >> 11) / static_cast<double>(1ull << 53) * 2.0 - 1.0;
    }
    return values;
}

// ---------------------------------------------------------------------------
// UsageLog

void UsageLog::append(UsageRecord record) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (record.manifest.empty()) record.manifest = manifest_;
    if (sink_.is_open()) {
        sink_ << dataset::serialize_usage(record) << '\n';
        sink_.flush();
    }
    records_.push_back(std::move(record));
}

std::vector<UsageRecord> UsageLog::snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_;
}

void UsageLog::open_sink(const std::filesystem::path& path) {
    std::lock_guard<std::mutex> lock(mutex_);
    sink_.open(path, std::ios::binary | std::ios::app);
    if (!sink_) throw errors::io("cannot open usage sink: " + path.string());
}

void UsageLog::set_manifest(std::string manifest_hash) {
    std::lock_guard<std::mutex> lock(mutex_);
    manifest_ = std::move(manifest_hash);
}

// ---------------------------------------------------------------------------
// Summaries

namespace {

TaskUsageSummary summarize(const std::vector<UsageRecord>& log,
                           const std::function<bool(const UsageRecord&)>& keep) {
    struct Totals {
        double in = 0, out = 0, lat = 0;
    };
    std::map<std::string, Totals> per_instance;
    for (const auto& rec : log) {
        if (!keep(rec)) continue;
        auto& t = per_instance[rec.instance_id];
        t.in += static_cast<double>(rec.input_tokens);
        t.out += static_cast<double>(rec.output_tokens);
        t.lat += rec.latency_s;
    }
    if (per_instance.empty()) throw Error(ErrorKind::EmptyLog, "no usage records match");
    std::vector<double> ins, outs, lats;
    for (const auto& [id, t] : per_instance) {
        ins.push_back(t.in);
        outs.push_back(t.out);
        lats.push_back(t.lat);
    }
    TaskUsageSummary s;
    s.input_tokens = util::median(ins);
    s.output_tokens = util::median(outs);
    s.latency_s = util::median(lats);
    s.n_instances = static_cast<long>(per_instance.size());
    return s;
}

}  // namespace

TaskUsageSummary usage_summary(const std::vector<UsageRecord>& log, Task task) {
    return summarize(log, [task](const UsageRecord& r) { return r.task == task; });
}

TaskUsageSummary usage_summary_all(const std::vector<UsageRecord>& log) {
    return summarize(log, [](const UsageRecord&) { return true; });
}

// ---------------------------------------------------------------------------
// ModelGateway

ModelGateway::ModelGateway(std::shared_ptr<Backend> backend, GatewayConfig config, UsageLog* log)
    : backend_(std::move(backend)), config_(std::move(config)), log_(log) {}

void ModelGateway::sleep_ms(int ms) const {
    if (config_.sleeper) {
        config_.sleeper(ms);
    } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
}

Completion ModelGateway::complete(const ModelSpec& spec, const std::string& prompt, int seed_hint,
                                  const CallContext& ctx) {
    if (prompt.empty()) throw Error(ErrorKind::EmptyInput, "empty prompt");

    const int attempts = 1 + config_.retries;
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const std::size_t i = static_cast<std::size_t>(attempt - 1);
            sleep_ms(i < config_.backoff_ms.size() ? config_.backoff_ms[i] : config_.backoff_ms.back());
        }
        const auto start = std::chrono::steady_clock::now();
        BackendReply reply;
        try {
            reply = backend_->complete_once(spec, prompt, seed_hint);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ContextLengthExceeded) throw;  // not retryable
            if (e.kind() != ErrorKind::BackendUnavailable) throw;
            last_error = e.what();
            continue;  // nothing consumed, nothing logged
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        UsageRecord usage;
        usage.instance_id = ctx.instance_id;
        usage.task = ctx.task;
        usage.run_index = ctx.run_index;
        usage.model_id = spec.model_id;
        usage.call_kind = ctx.call_kind;
        usage.latency_s = backend_->deterministic() ? 0.0 : elapsed;
        if (reply.input_tokens >= 0 && reply.output_tokens >= 0) {
            usage.input_tokens = reply.input_tokens;
            usage.output_tokens = reply.output_tokens;
        } else {
            usage.input_tokens = approx_tokens(prompt.size());
            usage.output_tokens = approx_tokens(reply.text.size());
            usage.approximate = true;
        }

        if (reply.text.empty()) {
            // The attempt consumed tokens but produced nothing usable.
            usage.failed = true;
            if (log_) log_->append(usage);
            last_error = "backend returned empty completion";
            continue;
        }

        if (log_) log_->append(usage);
        return Completion{reply.text, usage};
    }
    throw Error(ErrorKind::BackendUnavailable,
                "gave up after " + std::to_string(attempts) + " attempts: " + last_error);
}

EmbeddingVector ModelGateway::embed(const ModelSpec& spec, const std::string& text,
                                    const CallContext& ctx) {
    if (text.empty()) throw Error(ErrorKind::EmptyInput, "empty embedding input");

    const int attempts = 1 + config_.retries;
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            const std::size_t i = static_cast<std::size_t>(attempt - 1);
            sleep_ms(i < config_.backoff_ms.size() ? config_.backoff_ms[i] : config_.backoff_ms.back());
        }
        const auto start = std::chrono::steady_clock::now();
        std::vector<double> values;
        try {
            values = backend_->embed_once(spec, text);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BackendUnavailable) throw;
            last_error = e.what();
            continue;
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        UsageRecord usage;
        usage.instance_id = ctx.instance_id;
        usage.task = ctx.task;
        usage.run_index = ctx.run_index;
        usage.model_id = spec.model_id;
        usage.call_kind = CallKind::Embedding;
        usage.latency_s = backend_->deterministic() ? 0.0 : elapsed;
        usage.input_tokens = approx_tokens(text.size());
        usage.output_tokens = 0;
        usage.approximate = true;
        if (log_) log_->append(usage);

        EmbeddingVector vec;
        vec.values = std::move(values);
        vec.model_id = spec.model_id;
        return vec;
    }
    throw Error(ErrorKind::BackendUnavailable,
                "gave up after " + std::to_string(attempts) + " attempts: " + last_error);
}

}  // namespace swelabel::gateway
