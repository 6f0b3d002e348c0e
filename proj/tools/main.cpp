#include <iostream>

#include "vizcomp/cli.hpp"

int main(int argc, char** argv) { return vizcomp::run_cli(argc, argv, std::cout, std::cerr); }
