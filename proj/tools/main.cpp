#include <iostream>

#include "qtrap/cli.hpp"

int main(int argc, char** argv) { return qtrap::cli::run(argc, argv, std::cout, std::cerr); }
