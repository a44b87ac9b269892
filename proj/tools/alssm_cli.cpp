#include <vector>

#include "alssm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return alssm::run_cli(args);
}
