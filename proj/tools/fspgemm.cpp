#include <iostream>

#include "fspgemm/cli.hpp"

int main(int argc, char** argv)
{
    return fspgemm::cli::run(argc, argv, std::cout, std::cerr);
}
