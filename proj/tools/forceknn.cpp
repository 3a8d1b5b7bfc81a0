#include <iostream>
#include <string>
#include <vector>

#include "forceknn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return forceknn::cli::run(args, std::cout, std::cerr);
}
