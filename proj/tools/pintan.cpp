#include <iostream>

#include "pintan/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return pintan::run_cli(args, std::cout, std::cerr);
}
