#include <iostream>

#include "tcap/cli.hpp"

int main(int argc, char** argv) { return tcap::run_cli(argc, argv, std::cout, std::cerr); }
