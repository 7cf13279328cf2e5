#include <iostream>

#include "nvcom/cli.hpp"

int main(int argc, char** argv) { return nvcom::cli::run(argc, argv, std::cout, std::cerr); }
