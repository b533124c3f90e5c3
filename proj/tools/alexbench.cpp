#include <iostream>

#include "alexbench/cli/cli.hpp"

int main(int argc, char** argv) { return alexbench::cli::main_with(argc, argv, std::cout, std::cerr); }
