#include <iostream>

#include "furstenberg/cli.hpp"

int main(int argc, char** argv) { return furstenberg::cli::run(argc, argv, std::cout, std::cerr); }
