#include <exception>
#include <iostream>

#include "hamkac/cli.hpp"

int main(int argc, char** argv) {
  const auto parsed = hamkac::parse_args(argc, argv);
  if (!parsed.config) {
    (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message;
    return parsed.exit_code;
  }
  try {
    const auto res = hamkac::run(*parsed.config);
    if (res.exit_code == 2) {
      std::cerr << res.summary;
    } else if (parsed.config->json) {
      std::cout << res.report.dump(2) << '\n';
    } else {
      std::cout << res.summary;
    }
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
