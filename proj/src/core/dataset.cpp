#include "raft/core/dataset.hpp"

#include <fstream>
#include <unordered_set>

namespace raft {

using nlohmann::json;

std::string to_string(RankingMode mode) {
    switch (mode) {
        case RankingMode::next_token: return "next-token";
        case RankingMode::mask_ablation: return "mask-ablation";
        case RankingMode::random_order: return "random";
    }
    return "next-token";
}

std::string to_string(SelectionMode mode) {
    return mode == SelectionMode::greedy ? "greedy" : "random";
}

std::string to_string(GeneratorKind kind) {
    return kind == GeneratorKind::chat ? "chat" : "embedding";
}

RankingMode ranking_mode_from_string(const std::string& name) {
    if (name == "next-token" || name == "next_token") return RankingMode::next_token;
    if (name == "mask-ablation" || name == "mask_ablation") return RankingMode::mask_ablation;
    if (name == "random") return RankingMode::random_order;
    raise(ErrorKind::config, "unknown ranking mode: " + name);
}

SelectionMode selection_mode_from_string(const std::string& name) {
    if (name == "greedy") return SelectionMode::greedy;
    if (name == "random") return SelectionMode::random_pick;
    raise(ErrorKind::config, "unknown selection mode: " + name);
}

GeneratorKind generator_kind_from_string(const std::string& name) {
    if (name == "chat") return GeneratorKind::chat;
    if (name == "embedding") return GeneratorKind::embedding;
    raise(ErrorKind::config, "unknown generator kind: " + name);
}

void to_json(json& j, const AttackConfig& config) {
    j = json{{"k", config.mask_rate},
             {"t", config.num_candidates},
             {"pos_filter", config.pos_filter},
             {"coarse_pos", config.coarse_pos},
             {"ranking", to_string(config.ranking_mode)},
             {"selection", to_string(config.selection_mode)},
             {"generator", to_string(config.generator)},
             {"seed", config.seed}};
    if (config.threshold) j["tau"] = *config.threshold;
}

void from_json(const json& j, AttackConfig& config) {
    config = AttackConfig{};
    config.mask_rate = j.at("k").get<double>();
    config.num_candidates = j.at("t").get<int>();
    if (j.contains("tau") && !j["tau"].is_null()) config.threshold = j["tau"].get<double>();
    config.pos_filter = j.at("pos_filter").get<bool>();
    if (j.contains("coarse_pos")) config.coarse_pos = j["coarse_pos"].get<bool>();
    config.ranking_mode = ranking_mode_from_string(j.at("ranking").get<std::string>());
    config.selection_mode = selection_mode_from_string(j.at("selection").get<std::string>());
    config.generator = generator_kind_from_string(j.at("generator").get<std::string>());
    config.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const Substitution& sub) {
    j = json{{"word_index", sub.word_index},
             {"original", sub.original},
             {"replacement", sub.replacement},
             {"candidates_considered", sub.candidates_considered},
             {"detector_score_after", sub.detector_score_after}};
}

void from_json(const json& j, Substitution& sub) {
    sub.word_index = j.at("word_index").get<std::size_t>();
    sub.original = j.at("original").get<std::string>();
    sub.replacement = j.at("replacement").get<std::string>();
    sub.candidates_considered = j.at("candidates_considered").get<std::vector<std::string>>();
    sub.detector_score_after = j.at("detector_score_after").get<double>();
}

void to_json(json& j, const AttackRecord& record) {
    j = json{{"sample_id", record.sample_id},
             {"original_text", record.original_text},
             {"perturbed_text", record.perturbed_text},
             {"substitutions", record.substitutions},
             {"skipped_word_indices", record.skipped_word_indices},
             {"score_before", record.score_before},
             {"score_after", record.score_after},
             {"detector", record.detector_name},
             {"ranker", record.ranker_name},
             {"config", record.config_snapshot},
             {"elapsed_seconds", record.elapsed_seconds}};
}

void from_json(const json& j, AttackRecord& record) {
    record.sample_id = j.at("sample_id").get<std::string>();
    record.original_text = j.at("original_text").get<std::string>();
    record.perturbed_text = j.at("perturbed_text").get<std::string>();
    record.substitutions = j.at("substitutions").get<std::vector<Substitution>>();
    record.skipped_word_indices = j.at("skipped_word_indices").get<std::vector<std::size_t>>();
    record.score_before = j.at("score_before").get<double>();
    record.score_after = j.at("score_after").get<double>();
    record.detector_name = j.at("detector").get<std::string>();
    record.ranker_name = j.at("ranker").get<std::string>();
    record.config_snapshot = j.at("config").get<AttackConfig>();
    record.elapsed_seconds = j.at("elapsed_seconds").get<double>();
}

void to_json(json& j, const TextSample& sample) {
    j = json{{"id", sample.id},
             {"human", sample.human_text},
             {"machine", sample.machine_text},
             {"source_model", sample.source_model},
             {"dataset", sample.dataset}};
}

void from_json(const json& j, TextSample& sample) {
    sample.id = j.at("id").get<std::string>();
    sample.human_text = j.at("human").get<std::string>();
    sample.machine_text = j.at("machine").get<std::string>();
    sample.source_model = j.value("source_model", std::string{});
    sample.dataset = j.value("dataset", std::string{});
}

namespace {

json parse_line(const std::string& line, std::size_t index, const char* what) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        raise(ErrorKind::parse, std::string(what) + " record " + std::to_string(index) +
                                    ": malformed JSON");
    return j;
}

}  // namespace

std::vector<TextSample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open dataset file: " + path);

    std::vector<TextSample> samples;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = parse_line(line, index, "dataset");
        TextSample sample;
        try {
            sample = j.get<TextSample>();
        } catch (const json::exception& e) {
            raise(ErrorKind::parse,
                  "dataset record " + std::to_string(index) + ": " + e.what());
        }
        if (sample.human_text.empty() || sample.machine_text.empty())
            raise(ErrorKind::validation,
                  "dataset record " + std::to_string(index) + ": empty text");
        if (!seen_ids.insert(sample.id).second)
            raise(ErrorKind::validation, "duplicate sample id: " + sample.id);
        samples.push_back(std::move(sample));
        ++index;
    }
    return samples;
}

void save_dataset(const std::vector<TextSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::io, "cannot write dataset file: " + path);
    for (const TextSample& sample : samples) {
        json j = sample;
        out << j.dump() << '\n';
    }
    if (!out) raise(ErrorKind::io, "write failed: " + path);
}

void save_records(const std::vector<AttackRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::io, "cannot write records file: " + path);
    for (const AttackRecord& record : records) {
        json j = record;
        out << j.dump() << '\n';
    }
    if (!out) raise(ErrorKind::io, "write failed: " + path);
}

std::vector<AttackRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open records file: " + path);
    std::vector<AttackRecord> records;
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = parse_line(line, index, "records");
        try {
            records.push_back(j.get<AttackRecord>());
        } catch (const json::exception& e) {
            raise(ErrorKind::parse,
                  "records record " + std::to_string(index) + ": " + e.what());
        }
        ++index;
    }
    return records;
}

}  // namespace raft
