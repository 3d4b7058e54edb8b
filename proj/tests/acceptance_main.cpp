// One line per acceptance criterion; exit status 1 if any fails.
#include <iostream>
#include <string>

#include "runner.hpp"

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "acceptance_out";
  const auto results = slidekit::runner::acceptance_suite(out, {}, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (failed ? "acceptance: FAIL (" + std::to_string(failed) + " criteria)" : "acceptance: PASS") << '\n';
  return failed ? 1 : 0;
}
