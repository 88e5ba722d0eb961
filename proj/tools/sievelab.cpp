#include <iostream>

#include "sievelab_cli.hpp"

int main(int argc, char** argv) { return sievelab::cli::run(argc, argv, std::cout, std::cerr); }
