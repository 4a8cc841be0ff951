#include "sarcv/cli.hpp"

int main(int argc, char** argv) {
  return sarcv::cli_run(std::vector<std::string>(argv + 1, argv + argc));
}
