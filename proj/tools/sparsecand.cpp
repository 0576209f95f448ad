#include "sparsecand/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return sparsecand::run_cli(argc, argv, std::cout, std::cerr);
}
