#include <iostream>

#include "sdf/cli.hpp"

int main(int argc, char** argv) { return sdf::run_cli(argc, argv, std::cout, std::cerr); }
