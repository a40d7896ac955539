#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  return wavedens::cli::Main(std::vector<std::string>(argv, argv + argc), std::cerr);
}
