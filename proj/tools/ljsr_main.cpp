#include <string>
#include <vector>

#include "ljsr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ljsr::run_cli(args);
}
