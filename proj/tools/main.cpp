#include <iostream>

#include "freqprior/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return freqprior::cli::run_command(args, std::cout, std::cerr);
}
