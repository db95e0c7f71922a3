#include <iostream>

#include "fpplab/cli.hpp"

int main(int argc, char** argv) { return fpplab::cli::main_entry(argc, argv, std::cout, std::cerr); }
