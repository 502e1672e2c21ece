#include <string>
#include <vector>

#include "adsight/cli.hpp"

int main(int argc, char** argv) {
  return adsight::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
