#include <iostream>

#include "relaytune/cli/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return relaytune::cli::run_app(std::move(args), std::cout, std::cerr);
}
