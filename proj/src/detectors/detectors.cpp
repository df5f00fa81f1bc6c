#include "raft/detectors/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "raft/core/segment.hpp"

namespace raft {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double unit_double(std::uint64_t& state) {
    state = mix64(state);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
}

double mean_log_prob(const std::string& text, const TokenScorer& scorer) {
    auto tokens = scorer.score_tokens(text);
    if (tokens.empty())
        raise(ErrorKind::invalid_input, "text has no scoreable tokens");
    double total = 0.0;
    for (const auto& t : tokens) total += t.log_prob;
    return total / static_cast<double>(tokens.size());
}

}  // namespace

double detect_log_likelihood(const std::string& text, const TokenScorer& scorer) {
    return mean_log_prob(text, scorer);
}

double detect_log_rank(const std::string& text, const TokenScorer& scorer) {
    auto tokens = scorer.score_tokens(text);
    if (tokens.empty())
        raise(ErrorKind::invalid_input, "text has no scoreable tokens");
    double total = 0.0;
    for (const auto& t : tokens) total += std::log(t.rank);
    return -total / static_cast<double>(tokens.size());
}

double detect_detectgpt(const std::string& text, const TokenScorer& scorer,
                        const MaskInfiller& infiller, int n_perturbations,
                        const DetectGptOptions& options) {
    if (n_perturbations < 2)
        raise(ErrorKind::invalid_input, "detectgpt needs n_perturbations >= 2");

    WordSequence seq = segment_words(text);
    const std::size_t n_words = seq.n_words();
    if (n_words == 0) raise(ErrorKind::invalid_input, "text has no words");

    const double original = mean_log_prob(text, scorer);
    const std::size_t span = std::min(options.span_words, n_words);
    const std::size_t target_masked =
        std::max(span, static_cast<std::size_t>(std::lround(options.mask_fraction *
                                                            static_cast<double>(n_words))));

    std::vector<double> variant_scores;
    std::string last_failure;
    for (int v = 0; v < n_perturbations; ++v) {
        std::uint64_t state = mix64(options.seed ^ mix64(static_cast<std::uint64_t>(v) + 1));

        // shuffle candidate span starts, then greedily keep non-overlapping ones
        std::vector<std::size_t> starts(n_words - span + 1);
        std::iota(starts.begin(), starts.end(), 0);
        for (std::size_t i = starts.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(unit_double(state) * double(i));
            std::swap(starts[i - 1], starts[std::min(j, i - 1)]);
        }
        std::vector<bool> used(n_words, false);
        std::vector<std::size_t> chosen;
        std::size_t covered = 0;
        for (std::size_t s : starts) {
            if (covered >= target_masked) break;
            bool free = true;
            for (std::size_t k = s; k < s + span; ++k)
                if (used[k]) { free = false; break; }
            if (!free) continue;
            for (std::size_t k = s; k < s + span; ++k) used[k] = true;
            chosen.push_back(s);
            covered += span;
        }
        std::sort(chosen.begin(), chosen.end());
        std::vector<WordSpan> masked;
        for (std::size_t s : chosen) {
            WordSpan m;
            m.start = seq.words[s].start;
            m.end = seq.words[s + span - 1].end;
            masked.push_back(m);
        }

        try {
            std::string variant = infiller.infill(text, masked);
            variant_scores.push_back(mean_log_prob(variant, scorer));
        } catch (const std::exception& e) {
            last_failure = e.what();
        }
    }
    if (variant_scores.empty())
        raise(ErrorKind::detector, "all infilled variants failed: " + last_failure);

    double mu = std::accumulate(variant_scores.begin(), variant_scores.end(), 0.0) /
                static_cast<double>(variant_scores.size());
    if (variant_scores.size() < 2) return original - mu;
    double ss = 0.0;
    for (double s : variant_scores) ss += (s - mu) * (s - mu);
    double sigma = std::sqrt(ss / static_cast<double>(variant_scores.size() - 1));
    if (sigma < 1e-8) return original - mu;
    return (original - mu) / sigma;
}

double detect_fast_detectgpt(const std::string& text, const TokenScorer& scorer, int n_samples,
                             const FastDetectGptOptions& options) {
    if (n_samples < 2)
        raise(ErrorKind::invalid_input, "fast-detectgpt needs n_samples >= 2");

    auto tokens = scorer.score_tokens(text);
    if (tokens.empty())
        raise(ErrorKind::invalid_input, "text has no scoreable tokens");
    const std::size_t n_positions = tokens.size();
    double original = 0.0;
    for (const auto& t : tokens) original += t.log_prob;
    original /= static_cast<double>(n_positions);

    bool enumerate = false;
    if (options.mode == FastDetectGptOptions::Mode::enumerate) {
        enumerate = true;
    } else if (options.mode == FastDetectGptOptions::Mode::automatic) {
        enumerate = !scorer.enumerate_alternatives(text, 0).empty();
    }

    double mu = 0.0, sigma = 0.0;
    if (enumerate) {
        // exact per-position moments; sequence positions are independent
        double mean_sum = 0.0, var_sum = 0.0;
        for (std::size_t i = 0; i < n_positions; ++i) {
            auto dist = scorer.enumerate_alternatives(text, i);
            if (dist.empty())
                raise(ErrorKind::capability, "scorer cannot enumerate alternatives");
            double z = 0.0, e1 = 0.0, e2 = 0.0;
            for (const auto& alt : dist) {
                double p = std::exp(alt.log_prob);
                z += p;
                e1 += p * alt.log_prob;
                e2 += p * alt.log_prob * alt.log_prob;
            }
            e1 /= z;
            e2 /= z;
            mean_sum += e1;
            var_sum += std::max(0.0, e2 - e1 * e1);
        }
        mu = mean_sum / static_cast<double>(n_positions);
        sigma = std::sqrt(var_sum) / static_cast<double>(n_positions);
    } else {
        std::vector<double> sums(static_cast<std::size_t>(n_samples), 0.0);
        for (std::size_t i = 0; i < n_positions; ++i) {
            auto samples = scorer.sample_alternatives(text, i, static_cast<std::size_t>(n_samples));
            if (samples.size() != static_cast<std::size_t>(n_samples))
                raise(ErrorKind::backend, "scorer returned wrong sample count");
            for (std::size_t j = 0; j < samples.size(); ++j) sums[j] += samples[j].log_prob;
        }
        for (double& s : sums) s /= static_cast<double>(n_positions);
        mu = std::accumulate(sums.begin(), sums.end(), 0.0) / static_cast<double>(n_samples);
        double ss = 0.0;
        for (double s : sums) ss += (s - mu) * (s - mu);
        sigma = std::sqrt(ss / static_cast<double>(n_samples - 1));
    }

    if (sigma < 1e-8) return original - mu;
    return (original - mu) / sigma;
}

// ---------------------------------------------------------------------------

SubprocessDetector::SubprocessDetector(std::vector<std::string> argv, bool higher_is_machine,
                                       std::string display_name, std::chrono::milliseconds timeout)
    : argv_(std::move(argv)), higher_is_machine_(higher_is_machine),
      name_(std::move(display_name)), timeout_(timeout) {
    if (argv_.empty()) raise(ErrorKind::config, "subprocess detector needs a command");
    if (name_.empty()) name_ = "external:" + argv_.front();
}

double SubprocessDetector::score(const std::string& text) const {
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        raise(ErrorKind::detector, "pipe creation failed");

    pid_t pid = fork();
    if (pid < 0) raise(ErrorKind::detector, "fork failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        std::vector<char*> args;
        for (const auto& a : argv_) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);

    // feed the text, then read the score with a deadline
    std::size_t written = 0;
    while (written < text.size()) {
        ssize_t n = write(in_pipe[1], text.data() + written, text.size() - written);
        if (n <= 0) break;
        written += static_cast<std::size_t>(n);
    }
    close(in_pipe[1]);

    std::string output;
    auto deadline = std::chrono::steady_clock::now() + timeout_;
    bool timed_out = false;
    char buffer[4096];
    while (true) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            timed_out = true;
            break;
        }
        struct pollfd pfd {out_pipe[0], POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (rc == 0) {
            timed_out = true;
            break;
        }
        if (rc < 0) break;
        ssize_t n = read(out_pipe[0], buffer, sizeof buffer);
        if (n <= 0) break;
        output.append(buffer, static_cast<std::size_t>(n));
    }
    close(out_pipe[0]);
    if (timed_out) kill(pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);

    if (timed_out)
        raise(ErrorKind::detector, "external detector timed out: " + argv_.front());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        raise(ErrorKind::detector,
              "external detector exited with status " +
                  std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));

    const char* begin = output.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin)
        raise(ErrorKind::detector, "external detector output is not a number: " + output);
    return higher_is_machine_ ? value : -value;
}

EndpointDetector::EndpointDetector(std::string base_url, bool higher_is_machine,
                                   std::string display_name, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), higher_is_machine_(higher_is_machine),
      name_(std::move(display_name)), timeout_(timeout) {
    if (name_.empty()) name_ = "external:" + base_url_;
}

double EndpointDetector::score(const std::string& text) const {
    httplib::Client client(base_url_);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    client.set_connection_timeout(seconds.count() > 0 ? seconds.count() : 1, 0);
    client.set_read_timeout(seconds.count() > 0 ? seconds.count() : 1, 0);
    auto res = client.Post("/detect", nlohmann::json{{"text", text}}.dump(), "application/json");
    if (!res)
        raise(ErrorKind::detector,
              "external detector unreachable (" + httplib::to_string(res.error()) + "): " +
                  base_url_);
    if (res->status != 200)
        raise(ErrorKind::detector, "external detector HTTP " + std::to_string(res->status));
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("score"))
        raise(ErrorKind::detector, "external detector returned malformed response");
    double value = parsed["score"].get<double>();
    return higher_is_machine_ ? value : -value;
}

}  // namespace raft
