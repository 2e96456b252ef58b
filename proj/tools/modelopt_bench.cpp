#include <iostream>

#include "modelopt/cli.hpp"

int main(int argc, char** argv) {
  return modelopt::run_command(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
