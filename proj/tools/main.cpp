#include "smp/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return smp::cli::run(argc, argv, std::cout, std::cerr); }
