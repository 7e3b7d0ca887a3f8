#include <iostream>

#include "fredop/app.hpp"

int main(int argc, char** argv) { return fredop::run_cli(argc, argv, std::cout, std::cerr); }
