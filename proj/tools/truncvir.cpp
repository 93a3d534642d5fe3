#include "truncvir/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return truncvir::run_cli(argc, argv, std::cout, std::cerr);
}
