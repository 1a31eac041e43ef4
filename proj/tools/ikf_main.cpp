#include <iostream>

#include "ikf/cli.hpp"

int main(int argc, char** argv) { return ikf::cli_main(argc, argv, std::cout, std::cerr); }
