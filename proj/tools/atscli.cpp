#include <iostream>

#include "ats/cli.hpp"

int main(int argc, char** argv) { return ats::cli::run(argc, argv, std::cout, std::cerr); }
