#include <iostream>

#include "slin/cli.hpp"

int main(int argc, char** argv) { return slin::cli_main(argc, argv, std::cout, std::cerr); }
