#include <iostream>

#include "atch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return atch::run_cli(args, std::cout, std::cerr);
}
