// Regenerates the committed fixture logs: make_fixtures <output-dir>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "atch/fixtures.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 1;
    }
    std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    for (const auto& f : atch::fixtures::all()) {
        std::ofstream out(dir / (f.name + ".log"), std::ios::binary | std::ios::trunc);
        out << f.build().serialize();
        std::cout << (dir / (f.name + ".log")).string() << '\n';
    }
    return 0;
}
