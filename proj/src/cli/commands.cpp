#include "raft/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "raft/backends/verify.hpp"
#include "raft/cli/config.hpp"
#include "raft/core/dataset.hpp"
#include "raft/core/segment.hpp"
#include "raft/eval/experiment.hpp"

namespace raft {

namespace {

using nlohmann::json;

void require(bool condition, const std::string& message) {
    if (!condition) raise(ErrorKind::config, message);
}

ExperimentEnv make_env(BackendSet& backends) {
    ExperimentEnv env;
    env.detectors = backends.detectors;
    env.ranker = backends.ranker;
    env.generator = backends.generator.get();
    env.tagger = backends.tagger.get();
    env.perplexity_scorer = backends.scorer;
    env.embedder = backends.embedder;
    return env;
}

int run_attack_like(const RunConfig& config, bool sweep_mode, bool transfer_mode) {
    require(!config.dataset_path.empty(), "missing --dataset");
    BackendSet backends = build_backends(config);
    require(backends.detectors.count(config.detector) > 0,
            "unknown detector name: " + config.detector);
    require(backends.generator != nullptr,
            "no candidate generator bound (chat or wordvec backend required)");
    require(static_cast<bool>(backends.ranker.rank),
            "ranker '" + config.ranker + "' has no backend bound");
    if (config.attack.pos_filter)
        require(backends.tagger != nullptr, "pos_filter needs a tagger binding");

    std::vector<TextSample> samples = load_dataset(config.dataset_path);

    ExperimentSpec spec;
    spec.detector = config.detector;
    spec.config = config.attack;
    spec.worker_count = config.worker_count;
    spec.output_dir = config.output_path;
    spec.record_timing = config.record_timing;
    spec.run_snapshot = run_config_to_json(config);
    if (sweep_mode) spec.sweep_k = config.sweep_k;
    if (transfer_mode) spec.transfer_detectors = config.transfer_detectors;

    ExperimentEnv env = make_env(backends);
    ExperimentResult result = run_experiment(samples, spec, env);

    std::cout << format_report_line(result.unattacked) << '\n';
    std::cout << format_report_line(result.attacked) << '\n';
    {
        std::size_t replaced = 0;
        for (const auto& r : result.batch.records) replaced += r.substitutions.size();
        std::cout << "substitutions: " << replaced << " across " << result.batch.records.size()
                  << " samples";
        if (config.record_timing) {
            std::cout.precision(3);
            std::cout << std::fixed << " (" << result.attacked.runtime.mean_seconds_per_sample
                      << " s/sample, " << result.attacked.runtime.mean_seconds_per_word_replaced
                      << " s/word)";
            std::cout.unsetf(std::ios::fixed);
        }
        std::cout << '\n';
    }
    for (const auto& row : result.sweep) {
        std::cout.precision(4);
        std::cout << std::fixed << "sweep k=" << row.k << ": AUROC " << row.auroc_attacked
                  << ", ppl(median) " << row.perplexity_median_attacked << '\n';
        std::cout.unsetf(std::ios::fixed);
    }
    for (const auto& row : result.transfer) {
        std::cout.precision(4);
        std::cout << std::fixed << "transfer " << row.optimized_against << " -> "
                  << row.scored_by << ": AUROC " << row.auroc_attacked << '\n';
        std::cout.unsetf(std::ios::fixed);
    }
    if (!result.batch.failures.empty()) {
        std::cout << result.batch.failures.size() << " sample(s) failed:\n";
        for (const auto& failure : result.batch.failures)
            std::cout << "  " << failure.sample_id << ": " << failure.message << '\n';
    }
    for (const auto& path : result.artifact_paths) std::cout << "wrote " << path << '\n';
    return result.batch.failures.empty() ? 0 : 1;
}

int run_detect(const RunConfig& config) {
    require(!config.dataset_path.empty(), "missing --dataset");
    BackendSet backends = build_backends(config);
    auto it = backends.detectors.find(config.detector);
    require(it != backends.detectors.end(), "unknown detector name: " + config.detector);
    const Detector& detector = *it->second;

    std::vector<TextSample> samples = load_dataset(config.dataset_path);
    std::vector<double> human, machine;
    for (const auto& s : samples) {
        human.push_back(detector.score(s.human_text));
        machine.push_back(detector.score(s.machine_text));
    }
    EvalReport report;
    report.detector = detector.name();
    report.attack = "unattacked";
    report.auroc = auroc(human, machine);
    report.tpr_at_5fpr = tpr_at_fpr(human, machine, 0.05);
    report.n_samples = samples.size();
    std::cout << format_report_line(report) << '\n';

    if (!config.output_path.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(config.output_path);
        std::string hist = (fs::path(config.output_path) / "histogram.csv").string();
        std::ofstream out(hist);
        if (!out) raise(ErrorKind::io, "cannot write: " + hist);
        out << "score,population\n";
        out.precision(12);
        for (double s : human) out << s << ",human\n";
        for (double s : machine) out << s << ",machine\n";
        std::cout << "wrote " << hist << '\n';

        std::string roc = (fs::path(config.output_path) / "roc_unattacked.csv").string();
        std::ofstream roc_out(roc);
        if (!roc_out) raise(ErrorKind::io, "cannot write: " + roc);
        roc_out << "fpr,tpr\n";
        roc_out.precision(12);
        for (const auto& p : roc_points(human, machine)) roc_out << p.fpr << ',' << p.tpr << '\n';
        std::cout << "wrote " << roc << '\n';
    }
    return 0;
}

int run_evaluate(const RunConfig& config) {
    require(!config.records_path.empty(), "missing --records");
    require(!config.dataset_path.empty(), "missing --dataset");
    std::vector<AttackRecord> records = load_records(config.records_path);
    std::vector<TextSample> samples = load_dataset(config.dataset_path);
    require(!records.empty(), "records file is empty");

    BackendSet backends = build_backends(config);

    std::vector<double> before, after;
    for (const auto& r : records) {
        before.push_back(r.score_before);
        after.push_back(r.score_after);
    }

    json out;
    out["n_records"] = records.size();
    auto it = backends.detectors.find(config.detector);
    if (it != backends.detectors.end()) {
        std::vector<double> human;
        for (const auto& s : samples) human.push_back(it->second->score(s.human_text));
        double auroc_before = auroc(human, before);
        double auroc_after = auroc(human, after);
        out["detector"] = it->second->name();
        out["auroc_before"] = auroc_before;
        out["auroc_after"] = auroc_after;
        out["tpr_at_5fpr_after"] = tpr_at_fpr(human, after, 0.05);
        std::cout.precision(4);
        std::cout << std::fixed << it->second->name() << ": AUROC " << auroc_before << " -> "
                  << auroc_after << '\n';
        std::cout.unsetf(std::ios::fixed);
    }
    if (backends.scorer) {
        std::vector<double> clean, attacked;
        for (const auto& r : records) {
            clean.push_back(perplexity(r.original_text, *backends.scorer));
            attacked.push_back(perplexity(r.perturbed_text, *backends.scorer));
        }
        out["perplexity_median_unattacked"] = median(clean);
        out["perplexity_median_attacked"] = median(attacked);
        std::cout.precision(4);
        std::cout << std::fixed << "perplexity(median): " << median(clean) << " -> "
                  << median(attacked) << '\n';
        std::cout.unsetf(std::ios::fixed);
    }
    if (backends.embedder) {
        double total = 0.0;
        for (const auto& r : records)
            total += semantic_similarity(r.original_text, r.perturbed_text, *backends.embedder);
        double mean = total / static_cast<double>(records.size());
        out["cosine_similarity_mean"] = mean;
        std::cout.precision(4);
        std::cout << std::fixed << "cosine similarity (mean): " << mean << '\n';
        std::cout.unsetf(std::ios::fixed);
    }

    if (!config.output_path.empty()) {
        std::ofstream file(config.output_path);
        if (!file) raise(ErrorKind::io, "cannot write: " + config.output_path);
        file << out.dump(2) << '\n';
        std::cout << "wrote " << config.output_path << '\n';
    }
    return 0;
}

int run_transfer(const RunConfig& config) {
    if (config.records_path.empty())
        return run_attack_like(config, false, true);  // full pipeline, then transfer scoring

    require(!config.dataset_path.empty(), "missing --dataset");
    require(!config.transfer_detectors.empty(), "missing --transfer detector list");
    std::vector<AttackRecord> records = load_records(config.records_path);
    require(!records.empty(), "records file is empty");
    std::vector<TextSample> samples = load_dataset(config.dataset_path);
    BackendSet backends = build_backends(config);

    std::string optimized_against = records.front().detector_name;
    std::vector<TransferRow> rows;
    for (const auto& name : config.transfer_detectors) {
        auto it = backends.detectors.find(name);
        require(it != backends.detectors.end(), "unknown detector name: " + name);
        std::vector<double> human, attacked;
        for (const auto& s : samples) human.push_back(it->second->score(s.human_text));
        for (const auto& r : records) attacked.push_back(it->second->score(r.perturbed_text));
        rows.push_back({optimized_against, it->second->name(), auroc(human, attacked)});
    }
    for (const auto& row : rows) {
        std::cout.precision(4);
        std::cout << std::fixed << "transfer " << row.optimized_against << " -> " << row.scored_by
                  << ": AUROC " << row.auroc_attacked << '\n';
        std::cout.unsetf(std::ios::fixed);
    }
    if (!config.output_path.empty()) {
        std::ofstream out(config.output_path);
        if (!out) raise(ErrorKind::io, "cannot write: " + config.output_path);
        out << "optimized_against,scored_by,auroc\n";
        out.precision(12);
        for (const auto& row : rows)
            out << row.optimized_against << ',' << row.scored_by << ',' << row.auroc_attacked
                << '\n';
        std::cout << "wrote " << config.output_path << '\n';
    }
    return 0;
}

int run_export(const RunConfig& config) {
    require(!config.records_path.empty(), "missing --records");
    require(!config.dataset_path.empty(), "missing --dataset");
    require(!config.output_path.empty(), "missing --output");
    std::vector<AttackRecord> records = load_records(config.records_path);
    std::vector<TextSample> samples = load_dataset(config.dataset_path);
    export_adversarial(records, samples, config.output_path, config.include_unattacked,
                       config.attack.seed);
    std::size_t rows = records.size() * (config.include_unattacked ? 3 : 2);
    std::cout << "wrote " << rows << " rows to " << config.output_path << '\n';
    return 0;
}

int run_verify(const RunConfig& config) {
    BackendSet backends = build_backends(config);
    bool all_ok = true;
    bool verified_any = false;
    auto show = [&](const ConformanceReport& report) {
        verified_any = true;
        all_ok = all_ok && report.all_passed();
        std::cout << format_report(report);
    };
    if (backends.scorer) show(verify_scorer(*backends.scorer));
    if (backends.classifier) show(verify_classifier(*backends.classifier));
    if (backends.chat) show(verify_chat(*backends.chat));
    if (backends.embedder) show(verify_embedder(*backends.embedder));
    if (backends.tagger) show(verify_tagger(*backends.tagger));
    if (backends.word_vectors) {
        std::vector<std::string> probes;
        // probe with a few in-vocabulary words when a dataset is at hand
        if (!config.dataset_path.empty()) {
            auto samples = load_dataset(config.dataset_path);
            if (!samples.empty()) {
                WordSequence seq = segment_words(samples.front().machine_text);
                for (const auto& w : seq.words) {
                    if (probes.size() >= 5) break;
                    if (backends.word_vectors->contains(w.surface)) probes.push_back(w.surface);
                }
            }
        }
        show(verify_word_vectors(*backends.word_vectors, probes));
    }
    require(verified_any, "no backends bound; nothing to verify");
    return all_ok ? 0 : 1;
}

struct CommonFlags {
    std::string config_path;
    std::string dataset, records, output;
    std::string detector, ranker, generator;
    double k = -1.0;
    int t = -1;
    double tau = 0.0;
    bool tau_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    bool no_pos = false;
    bool coarse_pos = false;
    bool no_timing = false;
    std::string ngram_model, wordvec, lexicon;
    std::string scorer_endpoint, chat_endpoint, chat_key_env;
    std::string infiller;
    std::vector<double> sweep_k;
    std::vector<std::string> transfer;
    bool include_unattacked = false;
};

void add_backend_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file; flags override it");
    cmd->add_option("--ngram-model", flags.ngram_model, "path to an ngram model (local scorer)");
    cmd->add_option("--scorer-endpoint", flags.scorer_endpoint, "remote scorer base URL");
    cmd->add_option("--wordvec", flags.wordvec, "word-vector file (embedding generator)");
    cmd->add_option("--lexicon", flags.lexicon, "POS lexicon file");
    cmd->add_option("--chat-endpoint", flags.chat_endpoint, "remote chat base URL");
    cmd->add_option("--chat-key-env", flags.chat_key_env,
                    "environment variable holding the chat credential");
    cmd->add_option("--infiller", flags.infiller, "mask infiller: identity or ngram");
}

void add_attack_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--detector", flags.detector, "target detector name");
    cmd->add_option("--ranker", flags.ranker, "next-token, mask-ablation or random");
    cmd->add_option("--generator", flags.generator, "chat or embedding");
    cmd->add_option("--k", flags.k, "masking rate in (0,1]");
    cmd->add_option("--t", flags.t, "candidates per word");
    cmd->add_option("--tau", flags.tau, "early-stop threshold")->each([&flags](const std::string&) {
        flags.tau_set = true;
    });
    cmd->add_option("--seed", flags.seed, "run seed")->each([&flags](const std::string&) {
        flags.seed_set = true;
    });
    cmd->add_option("--workers", flags.workers, "parallel samples");
    cmd->add_flag("--no-pos-filter", flags.no_pos, "disable the POS consistency filter");
    cmd->add_flag("--coarse-pos", flags.coarse_pos, "compare coarse POS classes");
    cmd->add_flag("--no-timing", flags.no_timing, "zero timing fields for byte-stable artifacts");
}

RunConfig merge_config(const CommonFlags& flags, const std::string& command) {
    RunConfig config;
    if (!flags.config_path.empty()) config = load_run_config(flags.config_path);
    config.command = command;
    if (!flags.dataset.empty()) config.dataset_path = flags.dataset;
    if (!flags.records.empty()) config.records_path = flags.records;
    if (!flags.output.empty()) config.output_path = flags.output;
    if (!flags.detector.empty()) config.detector = flags.detector;
    if (!flags.ranker.empty()) config.ranker = flags.ranker;
    if (!flags.generator.empty())
        config.attack.generator = generator_kind_from_string(flags.generator);
    if (flags.k > 0.0) config.attack.mask_rate = flags.k;
    if (flags.t > 0) config.attack.num_candidates = flags.t;
    if (flags.tau_set) config.attack.threshold = flags.tau;
    if (flags.seed_set) config.attack.seed = flags.seed;
    if (flags.workers > 0) config.worker_count = flags.workers;
    if (flags.no_pos) config.attack.pos_filter = false;
    if (flags.coarse_pos) config.attack.coarse_pos = true;
    if (flags.no_timing) config.record_timing = false;
    if (!flags.sweep_k.empty()) config.sweep_k = flags.sweep_k;
    if (!flags.transfer.empty()) config.transfer_detectors = flags.transfer;
    if (flags.include_unattacked) config.include_unattacked = true;

    if (!flags.ngram_model.empty()) config.scorer = {"ngram", flags.ngram_model, "", "", {}};
    if (!flags.scorer_endpoint.empty())
        config.scorer = {"remote", "", flags.scorer_endpoint, "", {}};
    if (!flags.wordvec.empty()) config.wordvec = {"file", flags.wordvec, "", "", {}};
    if (!flags.lexicon.empty()) config.tagger = {"lexicon", flags.lexicon, "", "", {}};
    if (!flags.chat_endpoint.empty())
        config.chat = {"remote", "", flags.chat_endpoint, flags.chat_key_env, {}};
    if (!flags.infiller.empty()) config.infiller = {flags.infiller, "", "", "", {}};
    config.attack.validate();
    return config;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"word-substitution red-teaming toolkit for machine-text detectors"};
    app.require_subcommand(0, 1);

    CommonFlags flags;

    auto* attack = app.add_subcommand("attack", "attack a dataset and write records");
    attack->add_option("--dataset", flags.dataset, "dataset file (jsonl)")->required();
    attack->add_option("--output", flags.output, "artifact directory");
    add_attack_flags(attack, flags);
    add_backend_flags(attack, flags);

    auto* detect = app.add_subcommand("detect", "score a dataset with a detector");
    detect->add_option("--dataset", flags.dataset, "dataset file (jsonl)")->required();
    detect->add_option("--output", flags.output, "artifact directory");
    detect->add_option("--detector", flags.detector, "detector name");
    add_backend_flags(detect, flags);

    auto* evaluate = app.add_subcommand("evaluate", "recompute metrics from a records file");
    evaluate->add_option("--records", flags.records, "records file (jsonl)")->required();
    evaluate->add_option("--dataset", flags.dataset, "dataset file (jsonl)")->required();
    evaluate->add_option("--output", flags.output, "report file");
    evaluate->add_option("--detector", flags.detector, "detector name for human rescoring");
    add_backend_flags(evaluate, flags);

    auto* sweep = app.add_subcommand("sweep", "attack across masking rates");
    sweep->add_option("--dataset", flags.dataset, "dataset file (jsonl)")->required();
    sweep->add_option("--output", flags.output, "artifact directory");
    sweep->add_option("--sweep-k", flags.sweep_k, "masking rates")->delimiter(',');
    add_attack_flags(sweep, flags);
    add_backend_flags(sweep, flags);

    auto* transfer = app.add_subcommand("transfer", "score attacked records on other detectors");
    transfer->add_option("--dataset", flags.dataset, "dataset file (jsonl)")->required();
    transfer->add_option("--records", flags.records, "existing records file");
    transfer->add_option("--output", flags.output, "artifact path");
    transfer->add_option("--transfer", flags.transfer, "detector names")->delimiter(',');
    add_attack_flags(transfer, flags);
    add_backend_flags(transfer, flags);

    auto* export_adv = app.add_subcommand("export-adv", "write an adversarial training file");
    export_adv->add_option("--records", flags.records, "records file (jsonl)")->required();
    export_adv->add_option("--dataset", flags.dataset, "dataset file (jsonl)")->required();
    export_adv->add_option("--output", flags.output, "training file")->required();
    export_adv->add_flag("--include-unattacked", flags.include_unattacked,
                         "also emit clean machine texts");
    export_adv->add_option("--seed", flags.seed, "shuffle seed")->each([&flags](const std::string&) {
        flags.seed_set = true;
    });

    auto* verify = app.add_subcommand("verify-backends", "run contract conformance checks");
    verify->add_option("--dataset", flags.dataset, "dataset for probe words");
    add_backend_flags(verify, flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << app.help();
        return 2;
    }

    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        RunConfig config = merge_config(flags, command);
        if (command == "attack") return run_attack_like(config, false, false);
        if (command == "detect") return run_detect(config);
        if (command == "evaluate") return run_evaluate(config);
        if (command == "sweep") {
            if (config.sweep_k.empty()) config.sweep_k = {0.01, 0.05, 0.10, 0.15, 0.20};
            return run_attack_like(config, true, false);
        }
        if (command == "transfer") return run_transfer(config);
        if (command == "export-adv") return run_export(config);
        if (command == "verify-backends") return run_verify(config);
        std::cerr << "unknown command: " << command << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::config:
            case ErrorKind::validation:
            case ErrorKind::invalid_input:
            case ErrorKind::io:
            case ErrorKind::parse:
                return 2;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace raft
