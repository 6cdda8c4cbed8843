#include <iostream>

#include "uavmc/cli.hpp"

int main(int argc, char** argv) { return uavmc::run_cli(argc, argv, std::cout, std::cerr); }
