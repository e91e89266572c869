#include <iostream>

#include "monogeo/cli.hpp"

int main(int argc, char** argv) { return monogeo::cli::run(argc, argv, std::cout, std::cerr); }
