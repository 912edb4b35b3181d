#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "frsf/run_io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const frsf::RunConfig cfg = frsf::parse_config(args);
    return frsf::run(cfg);
  } catch (const frsf::ConfigError& e) {
    std::cerr << "frsf: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "frsf: error: " << e.what() << "\n";
    return 1;
  }
}
