#include <iostream>

#include "treeuniv/cli.hpp"

int main(int argc, char** argv) { return treeuniv::cli::run(argc, argv, std::cout, std::cerr); }
