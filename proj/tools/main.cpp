#include <iostream>

#include "sketchim/cli.hpp"

int main(int argc, char** argv) { return sketchim::cli::run(argc, argv, std::cout, std::cerr); }
