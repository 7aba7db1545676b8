#include <iostream>

#include "rieszlab/cli.hpp"

int main(int argc, char** argv) { return rieszlab::cli::main_entry(argc, argv, std::cout, std::cerr); }
