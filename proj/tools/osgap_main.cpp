#include <iostream>

#include "osgap/cli.hpp"

int main(int argc, char** argv) { return osgap::cli_main(argc, argv, std::cout, std::cerr); }
