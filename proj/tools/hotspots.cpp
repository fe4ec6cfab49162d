#include <iostream>

#include "hotspots/cli.hpp"

int main(int argc, char** argv) { return hotspots::main_entry(argc, argv, std::cout, std::cerr); }
