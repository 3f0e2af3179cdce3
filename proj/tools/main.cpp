#include <vector>

#include "sagaze/cli.hpp"

int main(int argc, char** argv) {
    return sagaze::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
