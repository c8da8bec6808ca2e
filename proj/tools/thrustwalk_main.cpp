#include <iostream>

#include "thrustwalk/cli.hpp"

int main(int argc, char** argv) { return thrustwalk::cli_main(argc, argv, std::cout, std::cerr); }
