#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return mcadiff::cli::run(argc, argv, std::cout, std::cerr);
}
