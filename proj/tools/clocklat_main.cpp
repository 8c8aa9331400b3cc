#include <iostream>

#include "clocklat/cli.hpp"

int main(int argc, char** argv) { return clocklat::run_cli(argc, argv, std::cout, std::cerr); }
