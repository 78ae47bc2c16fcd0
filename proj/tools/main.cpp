#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

int main(int argc, char** argv) {
  // Warnings go to stderr so stdout carries only reports.
  spdlog::set_default_logger(spdlog::stderr_color_mt("kgeval"));
  spdlog::set_pattern("[%l] %v");
  std::vector<std::string> args(argv + 1, argv + argc);
  return kgeval::cli::run(args, std::cout, std::cerr);
}
