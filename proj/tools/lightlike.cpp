#include <iostream>

#include "lightlike/cli.hpp"

int main(int argc, char** argv) { return lightlike::run_cli(argc, argv, std::cout, std::cerr); }
