#include <iostream>

#include "hsmoney/cli/app.hpp"

int main(int argc, char** argv) { return hsm::cli::run_cli(argc, argv, std::cout, std::cerr); }
