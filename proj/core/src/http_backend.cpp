#include <cstdlib>

#ifdef SWELABEL_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <nlohmann/json.hpp>

#include "swelabel/gateway.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::gateway {

namespace {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path_prefix;
};

Endpoint split_endpoint(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw Error(ErrorKind::ConfigError, "endpoint needs a scheme: " + url);
    std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, ""};
    return {url.substr(0, path), url.substr(path)};
}

std::string bearer_token(const ModelSpec& spec) {
    if (spec.api_key_env.empty()) return {};
    const char* value = std::getenv(spec.api_key_env.c_str());
    return value ? value : "";
}

json post_json(const ModelSpec& spec, const std::string& route, const json& body) {
    const Endpoint ep = split_endpoint(spec.endpoint);
    httplib::Client client(ep.base);
    client.set_read_timeout(300, 0);
    client.set_connection_timeout(10, 0);

    httplib::Headers headers;
    const std::string token = bearer_token(spec);
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    auto res = client.Post(ep.path_prefix + route, headers, body.dump(), "application/json");
    if (!res)
        throw Error(ErrorKind::BackendUnavailable,
                    "no response from " + ep.base + ": " + httplib::to_string(res.error()));
    if (res->status == 400 || res->status == 413) {
        const std::string lower = util::to_lower(res->body);
        if (lower.find("context_length") != std::string::npos ||
            lower.find("maximum context") != std::string::npos ||
            lower.find("too many tokens") != std::string::npos)
            throw Error(ErrorKind::ContextLengthExceeded, res->body.substr(0, 512));
    }
    if (res->status < 200 || res->status >= 300)
        throw Error(ErrorKind::BackendUnavailable,
                    "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 512));

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded())
        throw Error(ErrorKind::BackendUnavailable, "non-JSON reply from " + ep.base);
    return reply;
}

}  // namespace

BackendReply HttpBackend::complete_once(const ModelSpec& spec, const std::string& prompt,
                                        int seed_hint) {
    json body;
    body["model"] = spec.model_id;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = spec.temperature;
    body["max_tokens"] = spec.max_output_tokens;
    body["seed"] = seed_hint;

    json reply = post_json(spec, "/chat/completions", body);
    BackendReply out;
    try {
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::BackendUnavailable, "reply missing choices[0].message.content");
    }
    if (reply.contains("usage")) {
        out.input_tokens = reply["usage"].value("prompt_tokens", -1);
        out.output_tokens = reply["usage"].value("completion_tokens", -1);
    }
    return out;
}

std::vector<double> HttpBackend::embed_once(const ModelSpec& spec, const std::string& text) {
    json body;
    body["model"] = spec.model_id;
    body["input"] = text;

    json reply = post_json(spec, "/embeddings", body);
    try {
        return reply.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::BackendUnavailable, "reply missing data[0].embedding");
    }
}

}  // namespace swelabel::gateway
