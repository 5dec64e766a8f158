#include "fcep/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return fcep::cli::run(argc, argv, std::cout, std::cerr);
}
