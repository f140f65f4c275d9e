#include <iostream>

#include "usp/cli.hpp"

int main(int argc, char** argv) {
  return usp::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
