#include <vector>

#include "modica/cli.hpp"

int main(int argc, char** argv) {
  return modica::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
