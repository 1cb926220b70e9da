#include <vector>

#include "qrivx/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qrivx::run_cli(args);
}
