#include <iostream>

#include "voxcrf/commands.hpp"

int main(int argc, char** argv) { return voxcrf::run_cli(argc, argv, std::cout, std::cerr); }
