#include <iostream>

#include "hybridbf/cli.hpp"

int main(int argc, char** argv) { return hbf::run_cli(argc, argv, std::cout, std::cerr); }
