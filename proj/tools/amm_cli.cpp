#include "amm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return amm::cli::main_entry(argc, argv, std::cout, std::cerr); }
