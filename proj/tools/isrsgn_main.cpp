#include <iostream>

#include "isrsgn/cli_app.hpp"

int main(int argc, char** argv) { return isrsgn::run_cli(argc, argv, std::cout, std::cerr); }
