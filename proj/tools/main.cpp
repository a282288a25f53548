#include <iostream>

#include "dea_cli.hpp"

int main(int argc, char** argv) { return dea::cli::run(argc, argv, std::cout, std::cerr); }
