#include <iostream>

#include "fdr/cli.hpp"

int main(int argc, char** argv) { return fdr::cli::run(argc, argv, std::cout, std::cerr); }
