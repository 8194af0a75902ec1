#include <iostream>

#include "addcoal/cli.hpp"

int main(int argc, char** argv) { return addcoal::cli_main(argc, argv, std::cout, std::cerr); }
