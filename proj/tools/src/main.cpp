#include <iostream>

#include "robenv_cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return robenv::cli::run(args, std::cout, std::cerr);
}
