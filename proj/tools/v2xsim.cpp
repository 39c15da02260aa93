#include <iostream>

#include "v2x/cli.hpp"

int main(int argc, char** argv) { return v2x::cli::main(argc, argv, std::cout, std::cerr); }
