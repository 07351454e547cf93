#include <iostream>

#include "cli/run.hpp"

int main(int argc, char** argv) { return sipdyn::cli::run_main(argc, argv, std::cout, std::cerr); }
