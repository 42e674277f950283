// Runs criteria 1-9 and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--jobs N] [--kcut K] [--json FILE]

#include "splitbell/validation.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

int main(int argc, char** argv) {
  splitbell::ValidationOptions opt;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--jobs" && i + 1 < argc) opt.jobs = std::atoi(argv[++i]);
    else if (a == "--kcut" && i + 1 < argc) opt.k_cut = std::atoi(argv[++i]);
    else if (a == "--json" && i + 1 < argc) json_path = argv[++i];
    else {
      std::fprintf(stderr, "usage: acceptance [--jobs N] [--kcut K] [--json FILE]\n");
      return 2;
    }
  }
  const auto report = splitbell::run_validation(opt);
  for (const auto& c : report.checks) {
    std::printf("criterion %d %s: %s (%.1f s)\n", c.id, c.name.c_str(), c.passed ? "PASS" : "FAIL",
                c.seconds);
    if (!c.error.empty()) std::printf("    error: %s\n", c.error.c_str());
    for (const auto& m : c.measurements) {
      if (m.relation == "in")
        std::printf("    %-4s %s = %.10g in [%.10g, %.10g]\n", m.passed ? "ok" : "FAIL", m.quantity.c_str(),
                    m.measured, m.limit, m.upper);
      else
        std::printf("    %-4s %s = %.10g %s %.10g\n", m.passed ? "ok" : "FAIL", m.quantity.c_str(), m.measured,
                    m.relation.c_str(), m.limit);
    }
  }
  std::printf("%s\n", report.passed() ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  if (!json_path.empty()) std::ofstream(json_path) << report.to_json() << "\n";
  return report.passed() ? 0 : 1;
}
