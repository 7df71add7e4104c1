#include "pndm/cli.hpp"

int main(int argc, char** argv) {
    return pndm::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
