#include <iostream>

#include "loadforge/cli.hpp"

int main(int argc, char** argv) { return loadforge::cli::main(argc, argv, std::cout, std::cerr); }
