#include "demo_world.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "raft/core/dataset.hpp"
#include "raft/core/error.hpp"

namespace raft::demo {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(mix64(seed)) {}
    double uniform() {
        state = mix64(state);
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    std::size_t below(std::size_t n) {
        state = mix64(state);
        return static_cast<std::size_t>(state % n);
    }
    double gaussian() {
        // Box-Muller on two uniforms
        double u1 = std::max(uniform(), 1e-12);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
};

struct Cluster {
    std::string tag;
    std::vector<std::string> words;
};

// Synonym clusters, one part of speech each; Zipf-weighted sampling makes
// the leading members the "model-typical" choices.
const std::vector<Cluster>& clusters() {
    static const std::vector<Cluster> table = {
        {"NN", {"government", "council", "ministry", "administration", "authority", "cabinet",
                "leadership", "directorate"}},
        {"NN", {"plan", "proposal", "scheme", "initiative", "programme", "strategy", "blueprint",
                "agenda"}},
        {"NN", {"announcement", "statement", "declaration", "bulletin", "notice", "briefing",
                "dispatch", "communique"}},
        {"NN", {"funding", "investment", "budget", "grant", "subsidy", "financing", "allocation",
                "endowment"}},
        {"NN", {"project", "development", "venture", "undertaking", "effort", "operation",
                "enterprise", "endeavour"}},
        {"NN", {"region", "area", "district", "county", "borough", "territory", "zone",
                "province"}},
        {"NN", {"service", "network", "system", "infrastructure", "facility", "link", "route",
                "corridor"}},
        {"NN", {"report", "review", "study", "survey", "assessment", "audit", "inquiry",
                "evaluation"}},
        {"NN", {"growth", "recovery", "expansion", "improvement", "progress", "momentum",
                "upturn", "revival"}},
        {"NN", {"decision", "ruling", "verdict", "resolution", "judgement", "determination",
                "conclusion", "finding"}},
        {"NN", {"spokesman", "spokeswoman", "delegate", "representative", "minister", "director",
                "chairman", "secretary"}},
        {"NN", {"concern", "criticism", "opposition", "anxiety", "unease", "scepticism",
                "resistance", "disquiet"}},
        {"NNS", {"residents", "locals", "families", "commuters", "workers", "villagers",
                 "taxpayers", "households"}},
        {"NNS", {"changes", "measures", "reforms", "upgrades", "improvements", "revisions",
                 "adjustments", "modifications"}},
        {"NNS", {"jobs", "roles", "positions", "posts", "vacancies", "apprenticeships",
                 "placements", "openings"}},
        {"VBD", {"announced", "unveiled", "revealed", "confirmed", "declared", "disclosed",
                 "outlined", "presented"}},
        {"VBD", {"approved", "endorsed", "backed", "ratified", "sanctioned", "authorised",
                 "supported", "accepted"}},
        {"VBD", {"said", "stated", "added", "noted", "remarked", "insisted", "argued",
                 "maintained"}},
        {"VBD", {"warned", "cautioned", "claimed", "suggested", "predicted", "conceded",
                 "acknowledged", "admitted"}},
        {"VBD", {"increased", "raised", "boosted", "doubled", "lifted", "extended", "expanded",
                 "accelerated"}},
        {"VBD", {"welcomed", "praised", "criticised", "questioned", "opposed", "rejected",
                 "dismissed", "challenged"}},
        {"VB", {"improve", "upgrade", "modernise", "strengthen", "enhance", "overhaul",
                "revitalise", "streamline"}},
        {"VB", {"deliver", "provide", "supply", "secure", "guarantee", "ensure", "maintain",
                "sustain"}},
        {"VB", {"create", "generate", "produce", "establish", "build", "develop", "launch",
                "introduce"}},
        {"VB", {"reduce", "cut", "lower", "curb", "limit", "trim", "shrink", "ease"}},
        {"JJ", {"new", "fresh", "modern", "recent", "novel", "updated", "revised", "latest"}},
        {"JJ", {"major", "significant", "substantial", "considerable", "extensive", "sizeable",
                "notable", "sweeping"}},
        {"JJ", {"local", "regional", "municipal", "civic", "provincial", "nearby", "surrounding",
                "adjacent"}},
        {"JJ", {"important", "vital", "crucial", "essential", "critical", "key", "central",
                "fundamental"}},
        {"JJ", {"early", "initial", "preliminary", "provisional", "tentative", "interim",
                "transitional", "preparatory"}},
        {"RB", {"however", "meanwhile", "furthermore", "additionally", "consequently",
                "nevertheless", "moreover", "subsequently"}},
        {"RB", {"quickly", "rapidly", "swiftly", "promptly", "steadily", "gradually", "sharply",
                "markedly"}},
        {"NNP", {"Ashford", "Marlowe", "Crowley", "Denton", "Farley", "Weston", "Granby",
                 "Holt"}},
        {"CD", {"200", "300", "150", "500", "120", "400", "250", "600"}},
    };
    return table;
}

// function words with fixed tags; literals in the templates. Auxiliaries
// get their own tag so slot verbs never swap with "was"/"has".
const std::vector<std::pair<std::string, std::string>>& function_words() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"the", "DT"}, {"The", "DT"}, {"a", "DT"}, {"Some", "DT"},
        {"of", "IN"}, {"to", "TO"}, {"in", "IN"}, {"In", "IN"}, {"for", "IN"},
        {"on", "IN"}, {"by", "IN"}, {"with", "IN"}, {"after", "IN"}, {"over", "IN"},
        {"about", "IN"}, {"near", "IN"}, {"than", "IN"}, {"that", "IN"},
        {"which", "WDT"}, {"and", "CC"}, {"but", "CC"}, {"or", "CC"},
        {"has", "AUX"}, {"have", "AUX"}, {"is", "AUX"}, {"are", "AUX"},
        {"was", "AUX"}, {"were", "AUX"}, {"will", "MD"}, {"would", "MD"},
        {"could", "MD"}, {"it", "PRP"}, {"It", "PRP"}, {"its", "PRP$"},
        {"their", "PRP$"}, {"more", "JJR"}, {"people", "NNS"}, {"year", "NN"},
        {"next", "JJ"}, {"officials", "NNS"}, {"step", "NN"}, {"A", "DT"},
        {"this", "DT"},
    };
    return table;
}

// a template token is either a literal or #<cluster index>
struct Template {
    std::vector<std::string> tokens;
};

std::string slot(std::size_t cluster_index) { return "#" + std::to_string(cluster_index); }

// templates reference clusters by table position:
//  0 government 1 plan 2 announcement 3 funding 4 project 5 region
//  6 service 7 report 8 growth 9 decision 10 spokesman 11 concern
//  12 residents 13 changes 14 jobs
//  15 announced 16 approved 17 said 18 warned 19 increased 20 welcomed
//  21 improve 22 deliver 23 create 24 reduce
//  25 new 26 major 27 local 28 important 29 early
//  30 however 31 quickly  32 cities  33 numbers
std::vector<Template> make_templates() {
    auto t = [](std::initializer_list<std::string> tokens) { return Template{tokens}; };
    return {
        t({"The", slot(0), slot(15), "a", slot(25), slot(1), "to", slot(21), "the", slot(27),
           slot(6), "near", slot(32), "."}),
        t({"The", slot(1), "will", slot(23), slot(33), slot(14), "in", "the", slot(5), "over",
           "the", "next", "year", "."}),
        t({"The", slot(10), "for", "the", slot(0), slot(17), "the", slot(3), "would", slot(22),
           slot(26), slot(13), "for", slot(12), "."}),
        t({"The", slot(9), ",", slot(30), ",", "has", slot(19), slot(11), "about", "the",
           slot(29), slot(4), "in", slot(32), "."}),
        t({"The", slot(7), slot(18), "that", "the", slot(6), "could", slot(24), slot(8), "in",
           "the", slot(5), "."}),
        t({"Some", slot(12), "in", slot(32), slot(20), "the", slot(2), "of", "the", slot(25),
           slot(4), "."}),
        t({"The", slot(0), "has", slot(16), slot(33), "of", "the", slot(13), "after", "a",
           slot(26), slot(7), "."}),
        t({"In", slot(32), ",", "the", slot(27), slot(0), slot(15), "that", "the", slot(3),
           "for", "the", slot(4), "has", slot(19), "."}),
        t({"The", slot(10), slot(17), "that", "the", slot(13), "were", slot(28), "for", "the",
           slot(5), "and", "its", slot(12), "."}),
        t({"The", slot(29), slot(7), "on", "the", slot(6), "was", slot(20), "by", slot(12),
           "and", slot(27), "officials", "."}),
        t({"It", "is", "a", slot(28), "step", "for", "the", slot(5), ",", "a", slot(10),
           slot(17), "."}),
        t({"The", slot(4), "will", slot(22), "a", slot(25), slot(6), "for", "more", "than",
           slot(33), "people", "."}),
        t({"A", slot(10), "for", "the", slot(0), slot(17), "that", "the", slot(1), "would",
           slot(22), slot(26), slot(8), "."}),
        t({"The", slot(0), "will", slot(21), "the", slot(6), "in", "the", slot(5), "this",
           "year", "."}),
    };
}

struct World {
    std::vector<Cluster> cluster_table;
    std::vector<Template> templates;
    std::map<std::string, std::string> lexicon;
    std::map<std::string, std::size_t> word_cluster;  // word -> cluster index
};

World make_world() {
    World world;
    world.cluster_table = clusters();
    world.templates = make_templates();
    for (std::size_t c = 0; c < world.cluster_table.size(); ++c) {
        for (const std::string& w : world.cluster_table[c].words) {
            if (!world.lexicon.emplace(w, world.cluster_table[c].tag).second)
                raise(ErrorKind::validation, "duplicate demo vocabulary word: " + w);
            world.word_cluster.emplace(w, c);
        }
    }
    for (const auto& [w, tag] : function_words()) world.lexicon.emplace(w, tag);
    return world;
}

/// Zipf weights sharpened or flattened by temperature.
std::size_t sample_member(const Cluster& cluster, double temperature, Rng& rng) {
    double exponent = 1.0 / std::max(temperature, 1e-3);
    double total = 0.0;
    std::vector<double> weights(cluster.words.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] = std::pow(1.0 / static_cast<double>(i + 1), exponent);
        total += weights[i];
    }
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

std::string render_sentence(const World& world, const Template& tmpl, double temperature,
                            double noise_rate, Rng& rng) {
    std::string out;
    for (const std::string& token : tmpl.tokens) {
        std::string word = token;
        if (token[0] == '#') {
            std::size_t c = static_cast<std::size_t>(std::stoul(token.substr(1)));
            const Cluster* cluster = &world.cluster_table[c];
            if (noise_rate > 0.0 && rng.uniform() < noise_rate) {
                // pick a random same-POS cluster so the corpus carries a
                // little cross-cluster evidence
                std::vector<std::size_t> same_pos;
                for (std::size_t j = 0; j < world.cluster_table.size(); ++j)
                    if (world.cluster_table[j].tag == cluster->tag && j != c) same_pos.push_back(j);
                if (!same_pos.empty()) cluster = &world.cluster_table[same_pos[rng.below(same_pos.size())]];
            }
            word = cluster->words[sample_member(*cluster, temperature, rng)];
        }
        if (word == "," || word == "." || word == ";") {
            out += word;
        } else {
            if (!out.empty()) out += ' ';
            out += word;
        }
    }
    return out;
}

std::string render_passage(const World& world, std::size_t n_sentences, double temperature,
                           double noise_rate, Rng& rng) {
    std::string passage;
    for (std::size_t s = 0; s < n_sentences; ++s) {
        const Template& tmpl = world.templates[rng.below(world.templates.size())];
        if (!passage.empty()) passage += ' ';
        passage += render_sentence(world, tmpl, temperature, noise_rate, rng);
    }
    return passage;
}

}  // namespace

std::shared_ptr<DenseWordVectors> DemoWorld::make_vectors() const {
    return std::make_shared<DenseWordVectors>(vector_words, vector_matrix, vector_dim,
                                              "demo-vectors");
}

LexiconPosTagger DemoWorld::make_tagger() const { return LexiconPosTagger(lexicon); }

DemoWorld build_demo_world(const DemoOptions& options) {
    World world = make_world();
    Rng rng(options.seed);

    DemoWorld out;
    out.lexicon = world.lexicon;

    out.corpus.reserve(options.corpus_passages);
    for (std::size_t i = 0; i < options.corpus_passages; ++i)
        out.corpus.push_back(render_passage(world, options.sentences_per_passage, 1.0,
                                            options.corpus_noise_rate, rng));

    NgramLanguageModel::Weights weights;
    weights.trigram = 0.50;
    weights.bigram = 0.25;
    weights.unigram = 0.22;
    weights.uniform = 0.03;
    out.model = std::make_shared<NgramLanguageModel>(weights);
    out.model->fit(out.corpus);

    for (std::size_t i = 0; i < options.n_pairs; ++i) {
        TextSample sample;
        sample.id = "pair-" + std::to_string(1000 + i);
        sample.human_text = render_passage(world, options.sentences_per_passage,
                                           options.human_temperature, options.human_noise_rate,
                                           rng);
        sample.machine_text = render_passage(world, options.sentences_per_passage,
                                             options.machine_temperature, 0.0, rng);
        sample.source_model = "demo-lowtemp-sampler";
        sample.dataset = "demo-news";
        out.dataset.push_back(std::move(sample));
    }

    // word vectors: per-POS anchor + per-cluster center + per-member
    // noise, so neighbors are cluster mates first, then same-POS words.
    // Function words cluster by tag too, the way distributional vectors
    // group determiners and prepositions with each other.
    out.vector_dim = options.vector_dim;
    std::map<std::string, std::vector<double>> pos_anchor;
    auto random_unit = [&rng, &options]() {
        std::vector<double> v(options.vector_dim);
        double norm = 0.0;
        for (double& x : v) {
            x = rng.gaussian();
            norm += x * x;
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (double& x : v) x /= norm;
        return v;
    };
    auto add_word = [&out](const std::string& word, const std::vector<double>& vec) {
        out.vector_words.push_back(word);
        for (double x : vec) out.vector_matrix.push_back(static_cast<float>(x));
    };
    auto anchor_for = [&pos_anchor, &random_unit](const std::string& tag) {
        auto it = pos_anchor.find(tag);
        if (it == pos_anchor.end()) it = pos_anchor.emplace(tag, random_unit()).first;
        return it->second;
    };
    auto cluster_center = [&random_unit](const std::vector<double>& anchor) {
        std::vector<double> center = random_unit();
        for (std::size_t d = 0; d < center.size(); ++d)
            center[d] = 0.60 * anchor[d] + 0.40 * center[d];
        return center;
    };
    auto place = [&](const std::string& word, const std::vector<double>& center, double spread) {
        std::vector<double> noise = random_unit();
        std::vector<double> v(center.size());
        double norm = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d) {
            v[d] = center[d] + spread * noise[d];
            norm += v[d] * v[d];
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (double& x : v) x /= norm;
        add_word(word, v);
    };
    // frequent members sit closest to their cluster center, so the
    // cross-cluster neighbors that reach a top-t list are common words
    for (const Cluster& cluster : world.cluster_table) {
        std::vector<double> center = cluster_center(anchor_for(cluster.tag));
        for (std::size_t i = 0; i < cluster.words.size(); ++i)
            place(cluster.words[i], center, 0.10 + 0.035 * static_cast<double>(i));
    }
    // function words enter the vector table in lowercase, like a
    // lowercased distributional vocabulary, and only when the corpus
    // attests the lowercase form
    std::map<std::string, std::vector<std::string>> function_by_tag;
    std::set<std::string> placed;
    for (const auto& [word, tag] : function_words()) {
        std::string lower = word;
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (out.model->vocab_index(lower) == NgramLanguageModel::npos) continue;
        if (!placed.insert(lower).second) continue;
        function_by_tag[tag].push_back(lower);
    }
    for (const auto& [tag, words] : function_by_tag) {
        std::vector<double> center = cluster_center(anchor_for(tag));
        for (const std::string& word : words) place(word, center, 0.18);
    }

    return out;
}

void write_demo_files(const DemoWorld& world, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    save_dataset(world.dataset, (fs::path(dir) / "dataset.jsonl").string());

    world.model->save((fs::path(dir) / "ngram.model").string());

    {
        std::ofstream out(fs::path(dir) / "lexicon.txt");
        if (!out) raise(ErrorKind::io, "cannot write lexicon");
        for (const auto& [word, tag] : world.lexicon) out << word << '\t' << tag << '\n';
    }
    {
        DenseWordVectors vectors(world.vector_words, world.vector_matrix, world.vector_dim);
        vectors.save_text((fs::path(dir) / "vectors.txt").string());
    }
    {
        nlohmann::json config{
            {"detector", "log-rank"},
            {"ranker", "next-token"},
            {"attack",
             {{"k", 0.10}, {"t", 10}, {"pos_filter", true}, {"ranking", "next-token"},
              {"selection", "greedy"}, {"generator", "embedding"}, {"seed", 7}}},
            {"backends",
             {{"scorer", {{"kind", "ngram"}, {"path", (fs::path(dir) / "ngram.model").string()}}},
              {"tagger", {{"kind", "lexicon"}, {"path", (fs::path(dir) / "lexicon.txt").string()}}},
              {"wordvec", {{"kind", "file"}, {"path", (fs::path(dir) / "vectors.txt").string()}}},
              {"embedder", {{"kind", "wordvec"}}},
              {"infiller", {{"kind", "ngram"}}}}}};
        std::ofstream out(fs::path(dir) / "config.json");
        if (!out) raise(ErrorKind::io, "cannot write config");
        out << config.dump(2) << '\n';
    }
}

}  // namespace raft::demo
