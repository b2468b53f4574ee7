#include <iostream>

#include "lnip/cli.hpp"

int main(int argc, char** argv) { return lnip::cli::run(argc, argv, std::cout, std::cerr); }
