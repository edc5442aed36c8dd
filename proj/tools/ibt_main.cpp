#include <iostream>

#include "ibt/cli.hpp"

int main(int argc, char** argv) { return ibt::cli::run(argc, argv, std::cout, std::cerr); }
