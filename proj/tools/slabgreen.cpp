#include <iostream>

#include "slabgreen/cli.hpp"

int main(int argc, char** argv) { return slabgreen::cli::run(argc, argv, std::cout, std::cerr); }
