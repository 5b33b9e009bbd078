#include <string>
#include <vector>

#include "spreach/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spreach::run_command(args);
}
