#pragma once

#include <chrono>
#include <string>

#include "raft/backends/contracts.hpp"

namespace raft {

/// Scorer served over HTTP. POST /score with {"text": ...} returns
/// {"tokens": [{"text","start","end","logprob","rank"}, ...]}.
/// POST /sample with {"text","position","n"} returns {"tokens":
/// [{"text","logprob"}, ...]}; servers without it yield a capability
/// error. Credentials, when needed, come from the named environment
/// variable and are sent as a bearer token, never logged or persisted.
class RemoteScorer final : public TokenScorer {
public:
    explicit RemoteScorer(std::string base_url, std::string api_key_env = "",
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));

    std::vector<ScoredToken> score_tokens(const std::string& text) const override;
    std::vector<SampledToken> sample_alternatives(const std::string& text, std::size_t position,
                                                  std::size_t n) const override;
    std::size_t vocab_size() const override;
    std::string name() const override { return "remote-scorer(" + base_url_ + ")"; }

private:
    std::string base_url_;
    std::string api_key_env_;
    std::chrono::milliseconds timeout_;
};

/// Chat generator served over HTTP. POST /complete with {"prompt": ...}
/// returns {"text": ...}. Calls are retried with exponential backoff per
/// the policy; exhausted retries raise a backend error (the attack loop
/// skips the word).
class RemoteChat final : public ChatGenerator {
public:
    RemoteChat(std::string base_url, RetryPolicy policy = {}, std::string api_key_env = "");

    std::string complete(const std::string& prompt) override;
    std::string name() const override { return "remote-chat(" + base_url_ + ")"; }

private:
    std::string base_url_;
    RetryPolicy policy_;
    std::string api_key_env_;
};

}  // namespace raft
