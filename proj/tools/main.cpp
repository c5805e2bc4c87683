#include <iostream>

#include "lewsamp/cli.hpp"

int main(int argc, char** argv) {
  return lewsamp::cli::run(argc, argv, std::cout, std::cerr);
}
