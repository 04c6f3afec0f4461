#include <iostream>

#include "spaceform/cli.hpp"

int main(int argc, char** argv) { return spaceform::cli::run(argc, argv, std::cout, std::cerr); }
