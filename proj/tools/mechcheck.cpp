#include <iostream>

#include "mechcheck/cli.hpp"

int main(int argc, char** argv) { return mechcheck::run_cli(argc, argv, std::cout, std::cerr); }
