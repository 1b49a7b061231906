#include <iostream>

#include "dstft/cli.hpp"

int main(int argc, char** argv) { return dstft::run_cli(argc, argv, std::cout, std::cerr); }
