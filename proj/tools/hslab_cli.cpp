#include "hslab/app/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return hslab::app::cli_main(argc, argv, std::cout, std::cerr); }
