#include <iostream>
#include <string>
#include <vector>

#include "dorlicz/cli.hpp"

int main(int argc, char** argv) {
    return dorlicz::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
