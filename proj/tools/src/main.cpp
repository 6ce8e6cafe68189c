#include <iostream>

#include "swnc/cli.hpp"

int main(int argc, char** argv) { return swnc::cli::main_entry(argc, argv, std::cout, std::cerr); }
