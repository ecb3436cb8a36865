#include <iostream>

#include "riskguard/cli.hpp"

int main(int argc, char** argv) { return riskguard::cli::run(argc, argv, std::cout, std::cerr); }
