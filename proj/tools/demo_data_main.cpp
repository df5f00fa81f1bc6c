#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "demo/demo_world.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate a self-contained demo world (dataset, ngram model, vectors, lexicon)"};
    std::string output = "demo";
    raft::demo::DemoOptions options;
    app.add_option("--output", output, "output directory");
    app.add_option("--pairs", options.n_pairs, "number of human/machine pairs");
    app.add_option("--corpus-passages", options.corpus_passages, "training passages");
    app.add_option("--sentences", options.sentences_per_passage, "sentences per passage");
    app.add_option("--seed", options.seed, "generation seed");
    CLI11_PARSE(app, argc, argv);

    try {
        raft::demo::DemoWorld world = raft::demo::build_demo_world(options);
        raft::demo::write_demo_files(world, output);
        std::cout << "wrote demo world to " << output << "/ (" << world.dataset.size()
                  << " pairs, vocab " << world.model->vocabulary().size() << ")\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
