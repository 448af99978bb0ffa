#include "mcot/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mcot::run_cli(argc, argv, std::cout, std::cerr); }
