#include <cstdlib>
#include <iostream>
#include <unistd.h>

#include "commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  splitguard::cli::Terminal term;
  term.color = std::getenv("SPLITGUARD_NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
  return splitguard::cli::run(args, std::cout, std::cerr, term);
}
