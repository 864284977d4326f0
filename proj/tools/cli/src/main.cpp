#include <iostream>

#include "waveinfer_cli/commands.hpp"

int main(int argc, char** argv) { return waveinfer::cli::run_cli(argc, argv, std::cout, std::cerr); }
