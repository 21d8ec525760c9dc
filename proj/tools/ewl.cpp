#include <iostream>

#include "ewl/cli.hpp"

int main(int argc, char** argv) { return ewl::run_cli(argc, argv, std::cout, std::cerr); }
