#include <iostream>

#include "fabd/cli.hpp"

int main(int argc, char** argv) {
    return fabd::run(argc, argv, std::cout, std::cerr);
}
