#include <iostream>

#include "dtpc/cli.hpp"

int main(int argc, char** argv) {
  return dtpc::run_cli(argc, argv, std::cout, std::cerr);
}
