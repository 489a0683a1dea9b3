#include <iostream>
#include <set>
#include <vector>

#include "CLI11.hpp"
#include "msqn/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: one line per criterion"};
  std::vector<int> only;
  std::vector<int> expect_red;
  app.add_option("--only", only, "Criterion ids to run (repeatable)");
  app.add_option("--expect-red", expect_red,
                 "Criteria documented as failing; the exit code ignores them unless they pass");
  CLI11_PARSE(app, argc, argv);

  msqn::AcceptanceOptions options;
  options.only = std::set<int>(only.begin(), only.end());
  const auto results = msqn::run_acceptance(options);
  msqn::print_acceptance(results, std::cout);

  const std::set<int> red(expect_red.begin(), expect_red.end());
  int passed = 0;
  int unexpected = 0;
  for (const auto& r : results) {
    if (r.passed) ++passed;
    const bool known = red.count(r.id) > 0;
    if (r.passed == known) {
      ++unexpected;
      std::cout << "unexpected: C" << r.id << (r.passed ? " passed but is listed as red\n"
                                                         : " failed\n");
    }
  }
  std::cout << passed << '/' << results.size() << " criteria passed\n";
  return unexpected == 0 ? 0 : 1;
}
