#include "raft/backends/remote.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace raft {

using nlohmann::json;

namespace {

httplib::Client make_client(const std::string& base_url, const std::string& api_key_env,
                            std::chrono::milliseconds timeout) {
    httplib::Client client(base_url);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    client.set_connection_timeout(seconds.count() > 0 ? seconds.count() : 1, 0);
    client.set_read_timeout(seconds.count() > 0 ? seconds.count() : 1, 0);
    if (!api_key_env.empty()) {
        const char* key = std::getenv(api_key_env.c_str());
        if (key && *key) client.set_bearer_token_auth(key);
    }
    return client;
}

json post_json(httplib::Client& client, const std::string& path, const json& body,
               const char* what) {
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res)
        raise(ErrorKind::backend,
              std::string(what) + ": no response (" + httplib::to_string(res.error()) + ")");
    if (res->status == 404)
        raise(ErrorKind::capability, std::string(what) + ": endpoint not provided (" + path + ")");
    if (res->status != 200)
        raise(ErrorKind::backend,
              std::string(what) + ": HTTP " + std::to_string(res->status));
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded())
        raise(ErrorKind::backend, std::string(what) + ": malformed JSON response");
    return parsed;
}

}  // namespace

RemoteScorer::RemoteScorer(std::string base_url, std::string api_key_env,
                           std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), api_key_env_(std::move(api_key_env)), timeout_(timeout) {}

std::vector<ScoredToken> RemoteScorer::score_tokens(const std::string& text) const {
    auto client = make_client(base_url_, api_key_env_, timeout_);
    json response = post_json(client, "/score", json{{"text", text}}, "remote scorer");
    if (!response.contains("tokens") || !response["tokens"].is_array())
        raise(ErrorKind::backend, "remote scorer: response missing tokens array");
    std::vector<ScoredToken> out;
    out.reserve(response["tokens"].size());
    for (const auto& t : response["tokens"]) {
        ScoredToken token;
        token.text = t.at("text").get<std::string>();
        token.start = t.value("start", std::size_t{0});
        token.end = t.value("end", std::size_t{0});
        token.log_prob = t.at("logprob").get<double>();
        token.rank = t.at("rank").get<double>();
        out.push_back(std::move(token));
    }
    return out;
}

std::vector<SampledToken> RemoteScorer::sample_alternatives(const std::string& text,
                                                            std::size_t position,
                                                            std::size_t n) const {
    auto client = make_client(base_url_, api_key_env_, timeout_);
    json response = post_json(
        client, "/sample", json{{"text", text}, {"position", position}, {"n", n}},
        "remote scorer");
    if (!response.contains("tokens") || !response["tokens"].is_array())
        raise(ErrorKind::backend, "remote scorer: response missing tokens array");
    std::vector<SampledToken> out;
    out.reserve(response["tokens"].size());
    for (const auto& t : response["tokens"])
        out.push_back({t.at("text").get<std::string>(), t.at("logprob").get<double>()});
    return out;
}

std::size_t RemoteScorer::vocab_size() const {
    auto client = make_client(base_url_, api_key_env_, timeout_);
    auto res = client.Get("/info");
    if (!res || res->status != 200) return 0;  // informational only
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) return 0;
    return parsed.value("vocab_size", std::size_t{0});
}

RemoteChat::RemoteChat(std::string base_url, RetryPolicy policy, std::string api_key_env)
    : base_url_(std::move(base_url)), policy_(policy), api_key_env_(std::move(api_key_env)) {}

std::string RemoteChat::complete(const std::string& prompt) {
    auto backoff = policy_.initial_backoff;
    std::string last_error;
    for (int attempt = 0; attempt < policy_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<long>(backoff.count() * policy_.backoff_factor));
        }
        try {
            auto client = make_client(base_url_, api_key_env_, policy_.timeout);
            json response = post_json(client, "/complete", json{{"prompt", prompt}}, "remote chat");
            if (!response.contains("text"))
                raise(ErrorKind::backend, "remote chat: response missing text");
            return response["text"].get<std::string>();
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    raise(ErrorKind::backend,
          "remote chat: " + std::to_string(policy_.max_attempts) + " attempts failed; last: " +
              last_error);
}

}  // namespace raft
