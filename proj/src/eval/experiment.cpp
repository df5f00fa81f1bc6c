#include "raft/eval/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "raft/core/dataset.hpp"

namespace raft {

using nlohmann::json;

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

PerplexityStats perplexity_stats(const std::vector<std::string>& texts,
                                 const TokenScorer& scorer) {
    std::vector<double> values;
    values.reserve(texts.size());
    for (const auto& text : texts) values.push_back(perplexity(text, scorer));
    PerplexityStats stats;
    stats.median = median(values);
    stats.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                 static_cast<double>(values.size());
    return stats;
}

json report_to_json(const EvalReport& r) {
    json j{{"detector", r.detector},
           {"attack", r.attack},
           {"auroc", r.auroc},
           {"tpr_at_5fpr", r.tpr_at_5fpr},
           {"perplexity_attacked", {{"median", r.perplexity_attacked.median},
                                    {"mean", r.perplexity_attacked.mean}}},
           {"perplexity_unattacked", {{"median", r.perplexity_unattacked.median},
                                      {"mean", r.perplexity_unattacked.mean}}},
           {"n_samples", r.n_samples},
           {"runtime", {{"mean_seconds_per_sample", r.runtime.mean_seconds_per_sample},
                        {"mean_seconds_per_word_replaced",
                         r.runtime.mean_seconds_per_word_replaced}}}};
    if (r.cosine_similarity_mean) j["cosine_similarity_mean"] = *r.cosine_similarity_mean;
    else j["cosine_similarity_mean"] = nullptr;
    return j;
}

void write_roc_csv(const std::string& path, const std::vector<RocPoint>& points) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::io, "cannot write: " + path);
    out << "fpr,tpr\n";
    out.precision(12);
    for (const auto& p : points) out << p.fpr << ',' << p.tpr << '\n';
}

const std::shared_ptr<const Detector>& resolve_detector(
    const std::map<std::string, std::shared_ptr<const Detector>>& registry,
    const std::string& name) {
    auto it = registry.find(name);
    if (it == registry.end())
        raise(ErrorKind::config, "unknown detector name: " + name);
    return it->second;
}

}  // namespace

ExperimentResult run_experiment(const std::vector<TextSample>& samples,
                                const ExperimentSpec& spec, ExperimentEnv& env) {
    if (samples.empty()) raise(ErrorKind::validation, "experiment needs samples");
    if (env.generator == nullptr) raise(ErrorKind::config, "experiment needs a generator");
    if (!env.ranker.rank) raise(ErrorKind::config, "unknown ranker: no ranking function bound");
    spec.config.validate();

    // resolve every referenced detector before touching any backend
    const auto& target = resolve_detector(env.detectors, spec.detector);
    std::vector<std::shared_ptr<const Detector>> transfer;
    for (const auto& name : spec.transfer_detectors)
        transfer.push_back(resolve_detector(env.detectors, name));

    ExperimentResult result;

    for (const TextSample& sample : samples) {
        result.human_scores.push_back(target->score(sample.human_text));
        result.machine_scores.push_back(target->score(sample.machine_text));
    }

    result.batch = attack_dataset(samples, spec.config, *target, env.ranker, *env.generator,
                                  env.tagger, spec.worker_count);
    if (!spec.record_timing)
        for (AttackRecord& record : result.batch.records) record.elapsed_seconds = 0.0;
    for (const AttackRecord& record : result.batch.records)
        result.attacked_scores.push_back(record.score_after);
    if (result.attacked_scores.empty())
        raise(ErrorKind::batch, "attack produced no records");

    // reports
    std::vector<std::string> human_texts, machine_texts, attacked_texts;
    for (const auto& s : samples) {
        human_texts.push_back(s.human_text);
        machine_texts.push_back(s.machine_text);
    }
    for (const auto& r : result.batch.records) attacked_texts.push_back(r.perturbed_text);

    result.unattacked.detector = target->name();
    result.unattacked.attack = "unattacked";
    result.unattacked.auroc = auroc(result.human_scores, result.machine_scores);
    result.unattacked.tpr_at_5fpr = tpr_at_fpr(result.human_scores, result.machine_scores, 0.05);
    result.unattacked.n_samples = samples.size();

    result.attacked.detector = target->name();
    result.attacked.attack = env.ranker.name + "+" + env.generator->name();
    result.attacked.auroc = auroc(result.human_scores, result.attacked_scores);
    result.attacked.tpr_at_5fpr = tpr_at_fpr(result.human_scores, result.attacked_scores, 0.05);
    result.attacked.n_samples = result.batch.records.size();

    if (env.perplexity_scorer) {
        PerplexityStats clean = perplexity_stats(machine_texts, *env.perplexity_scorer);
        PerplexityStats perturbed = perplexity_stats(attacked_texts, *env.perplexity_scorer);
        result.unattacked.perplexity_unattacked = clean;
        result.unattacked.perplexity_attacked = clean;
        result.attacked.perplexity_unattacked = clean;
        result.attacked.perplexity_attacked = perturbed;
    }
    if (env.embedder) {
        double total = 0.0;
        for (const auto& r : result.batch.records)
            total += semantic_similarity(r.original_text, r.perturbed_text, *env.embedder);
        result.attacked.cosine_similarity_mean =
            total / static_cast<double>(result.batch.records.size());
    }
    {
        double total_elapsed = 0.0;
        double total_replaced = 0.0;
        for (const auto& r : result.batch.records) {
            total_elapsed += r.elapsed_seconds;
            total_replaced += static_cast<double>(r.substitutions.size());
        }
        result.attacked.runtime.mean_seconds_per_sample =
            total_elapsed / static_cast<double>(result.batch.records.size());
        result.attacked.runtime.mean_seconds_per_word_replaced =
            total_replaced > 0.0 ? total_elapsed / total_replaced : 0.0;
    }

    // masking sweep: the main run's k plus any extra rates
    std::vector<double> sweep_rates = spec.sweep_k;
    if (!sweep_rates.empty()) {
        if (std::find(sweep_rates.begin(), sweep_rates.end(), spec.config.mask_rate) ==
            sweep_rates.end())
            sweep_rates.push_back(spec.config.mask_rate);
        std::sort(sweep_rates.begin(), sweep_rates.end());
        for (double k : sweep_rates) {
            SweepRow row;
            row.k = k;
            if (k == spec.config.mask_rate) {
                row.auroc_attacked = result.attacked.auroc;
                row.perplexity_median_attacked = result.attacked.perplexity_attacked.median;
            } else {
                AttackConfig config = spec.config;
                config.mask_rate = k;
                BatchResult batch = attack_dataset(samples, config, *target, env.ranker,
                                                   *env.generator, env.tagger, spec.worker_count);
                std::vector<double> scores;
                std::vector<std::string> texts;
                for (const auto& r : batch.records) {
                    scores.push_back(r.score_after);
                    texts.push_back(r.perturbed_text);
                }
                if (scores.empty()) raise(ErrorKind::batch, "sweep run produced no records");
                row.auroc_attacked = auroc(result.human_scores, scores);
                row.perplexity_median_attacked =
                    env.perplexity_scorer ? perplexity_stats(texts, *env.perplexity_scorer).median
                                          : 0.0;
            }
            result.sweep.push_back(row);
        }
    }

    // transferability: rescore this run's perturbed texts under other detectors
    for (std::size_t d = 0; d < transfer.size(); ++d) {
        std::vector<double> human, attacked;
        for (const auto& s : samples) human.push_back(transfer[d]->score(s.human_text));
        for (const auto& r : result.batch.records)
            attacked.push_back(transfer[d]->score(r.perturbed_text));
        TransferRow row;
        row.optimized_against = target->name();
        row.scored_by = transfer[d]->name();
        row.auroc_attacked = auroc(human, attacked);
        result.transfer.push_back(row);
    }

    if (!spec.output_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(spec.output_dir);
        auto emit = [&result](const std::string& path) { result.artifact_paths.push_back(path); };

        std::string records_path = (fs::path(spec.output_dir) / "records.jsonl").string();
        save_records(result.batch.records, records_path);
        emit(records_path);

        std::string report_path = (fs::path(spec.output_dir) / "report.json").string();
        {
            json j{{"reports", json::array({report_to_json(result.unattacked),
                                            report_to_json(result.attacked)})}};
            if (!spec.run_snapshot.is_null()) j["run"] = spec.run_snapshot;
            if (!result.sweep.empty()) {
                json rows = json::array();
                for (const auto& row : result.sweep)
                    rows.push_back({{"k", row.k},
                                    {"auroc", row.auroc_attacked},
                                    {"perplexity_median", row.perplexity_median_attacked}});
                j["sweep"] = rows;
            }
            if (!result.transfer.empty()) {
                json rows = json::array();
                for (const auto& row : result.transfer)
                    rows.push_back({{"optimized_against", row.optimized_against},
                                    {"scored_by", row.scored_by},
                                    {"auroc", row.auroc_attacked}});
                j["transfer"] = rows;
            }
            std::ofstream out(report_path);
            if (!out) raise(ErrorKind::io, "cannot write: " + report_path);
            out << j.dump(2) << '\n';
        }
        emit(report_path);

        std::string hist_path = (fs::path(spec.output_dir) / "histogram.csv").string();
        {
            std::ofstream out(hist_path);
            if (!out) raise(ErrorKind::io, "cannot write: " + hist_path);
            out << "score,population\n";
            out.precision(12);
            for (double s : result.human_scores) out << s << ",human\n";
            for (double s : result.machine_scores) out << s << ",machine\n";
            for (double s : result.attacked_scores) out << s << ",attacked\n";
        }
        emit(hist_path);

        std::string roc_clean = (fs::path(spec.output_dir) / "roc_unattacked.csv").string();
        write_roc_csv(roc_clean, roc_points(result.human_scores, result.machine_scores));
        emit(roc_clean);
        std::string roc_attacked = (fs::path(spec.output_dir) / "roc_attacked.csv").string();
        write_roc_csv(roc_attacked, roc_points(result.human_scores, result.attacked_scores));
        emit(roc_attacked);

        if (!result.sweep.empty()) {
            std::string sweep_path = (fs::path(spec.output_dir) / "sweep.csv").string();
            std::ofstream out(sweep_path);
            if (!out) raise(ErrorKind::io, "cannot write: " + sweep_path);
            out << "k,auroc,perplexity_median\n";
            out.precision(12);
            for (const auto& row : result.sweep)
                out << row.k << ',' << row.auroc_attacked << ','
                    << row.perplexity_median_attacked << '\n';
            emit(sweep_path);
        }
        if (!result.transfer.empty()) {
            std::string transfer_path = (fs::path(spec.output_dir) / "transfer.csv").string();
            std::ofstream out(transfer_path);
            if (!out) raise(ErrorKind::io, "cannot write: " + transfer_path);
            out << "optimized_against,scored_by,auroc\n";
            out.precision(12);
            for (const auto& row : result.transfer)
                out << row.optimized_against << ',' << row.scored_by << ','
                    << row.auroc_attacked << '\n';
            emit(transfer_path);
        }
    }

    return result;
}

void export_adversarial(const std::vector<AttackRecord>& records,
                        const std::vector<TextSample>& clean_samples, const std::string& path,
                        bool include_unattacked, std::uint64_t seed) {
    if (records.empty() || clean_samples.empty())
        raise(ErrorKind::validation, "export needs records and samples");

    std::unordered_map<std::string, const TextSample*> by_id;
    for (const TextSample& s : clean_samples) by_id.emplace(s.id, &s);
    if (by_id.size() != clean_samples.size())
        raise(ErrorKind::validation, "duplicate sample ids");
    if (records.size() != clean_samples.size())
        raise(ErrorKind::validation, "records and samples do not match one-to-one");

    std::vector<std::pair<std::string, std::string>> rows;  // (text, label)
    for (const AttackRecord& record : records) {
        auto it = by_id.find(record.sample_id);
        if (it == by_id.end())
            raise(ErrorKind::validation, "record id not in samples: " + record.sample_id);
        rows.emplace_back(it->second->human_text, "human");
        rows.emplace_back(record.perturbed_text, "machine");
        if (include_unattacked) rows.emplace_back(it->second->machine_text, "machine");
    }

    std::uint64_t state = mix64(seed + 0xADA0ull);
    for (std::size_t i = rows.size(); i > 1; --i) {
        state = mix64(state);
        std::swap(rows[i - 1], rows[state % i]);
    }

    std::ofstream out(path);
    if (!out) raise(ErrorKind::io, "cannot write: " + path);
    for (const auto& [text, label] : rows)
        out << json{{"text", text}, {"label", label}}.dump() << '\n';
    if (!out) raise(ErrorKind::io, "write failed: " + path);
}

std::string format_report_line(const EvalReport& report) {
    std::ostringstream os;
    os.precision(4);
    os << std::fixed;
    os << report.detector << " / " << report.attack << ": AUROC " << report.auroc
       << ", TPR@5%FPR " << report.tpr_at_5fpr;
    if (report.perplexity_attacked.median > 0.0)
        os << ", ppl(median) " << report.perplexity_attacked.median;
    if (report.cosine_similarity_mean) os << ", cos " << *report.cosine_similarity_mean;
    os << ", n=" << report.n_samples;
    return os.str();
}

}  // namespace raft
