#include <iostream>

#include "polaudit/cli.hpp"

int main(int argc, char** argv) { return polaudit::cli::main_entry(argc, argv, std::cout, std::cerr); }
