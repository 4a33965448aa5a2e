#include <string>
#include <vector>

#include "volfit/cli.hpp"

int main(int argc, char** argv) {
  return volfit::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
