#include <iostream>

#include "dmm/cli/cli.hpp"

int main(int argc, char** argv) { return dmm::cli::run_cli(argc, argv, std::cout, std::cerr); }
