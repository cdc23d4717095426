#include "insulopt/cli.hpp"

int main(int argc, char** argv) {
  return insulopt::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
