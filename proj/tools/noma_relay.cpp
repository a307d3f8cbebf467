#include <iostream>

#include "noma/cli.hpp"

int main(int argc, char** argv) {
  try {
    return noma::run_cli(argc, argv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return noma::kExitConfig;
  }
}
