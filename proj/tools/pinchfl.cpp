#include <iostream>
#include <string>
#include <vector>

#include "pinchfl/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pinchfl::cli::run_command(args, std::cout, std::cerr);
}
