#include "linresp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return linresp::cli::run(argc, argv, std::cout, std::cerr); }
