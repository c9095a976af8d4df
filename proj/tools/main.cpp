#include <iostream>

#include "textgcn/cli.hpp"

int main(int argc, char** argv) {
  return textgcn::run_cli(argc, argv, std::cout, std::cerr);
}
