#include <vector>

#include "raft/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return raft::run_cli(args);
}
