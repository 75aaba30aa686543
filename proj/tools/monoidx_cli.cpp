#include <iostream>

#include <monoidx/cli.hpp>

int main(int argc, char** argv) {
    return monoidx::run_cli(argc, argv, std::cout, std::cerr);
}
