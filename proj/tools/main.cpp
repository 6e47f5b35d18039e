#include <string>
#include <vector>

#include "wrg/cli.hpp"

int main(int argc, char** argv) {
  return wrg::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
