// Runs the acceptance suite with one and with four workers and prints one
// line per criterion. Criterion 12 compares the two report files byte for byte.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "locop/acceptance.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "acceptance_out";
  std::filesystem::create_directories(dir);
  const std::string one = (dir / "selftest_threads1.csv").string();
  const std::string four = (dir / "selftest_threads4.csv").string();
  auto progress = [](const char* tag) {
    return [tag](int id, double seconds) { std::fprintf(stderr, "[%s] criterion %d took %.1f s\n", tag, id, seconds); };
  };

  const auto rows = locop::selftest(1, "csv", one, progress("threads=1"));
  locop::selftest(4, "csv", four, progress("threads=4"));

  bool all = true;
  for (const auto& c : locop::summarize_acceptance(rows)) {
    std::cout << "criterion " << c.id << " (" << c.name << "): " << (c.pass ? "PASS" : "FAIL") << " - " << c.detail
              << "\n";
    all = all && c.pass;
  }
  const std::string a = slurp(one), b = slurp(four);
  const bool same = !a.empty() && a == b;
  std::cout << "criterion 12 (determinism): " << (same ? "PASS" : "FAIL") << " - selftest reports with 1 and 4 threads "
            << (same ? "are byte-identical" : "differ") << " (" << a.size() << " bytes)\n";
  return all && same ? 0 : 1;
}
