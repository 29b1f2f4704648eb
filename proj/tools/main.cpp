#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "alphalda/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const alphalda::RunSpec spec = alphalda::parse_config(args);
    return alphalda::run(spec);
  } catch (const alphalda::HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
