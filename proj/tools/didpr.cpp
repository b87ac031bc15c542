#include <iostream>
#include <string>
#include <vector>

#include "didpr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return didpr::cli::run(args, std::cout, std::cerr);
}
