#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("splitbell_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout";
  const auto err = scratch() / "stderr";
  const std::string cmd = std::string("\"") + SPLITBELL_CLI + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exact") {
  const auto r = run("exact");
  REQUIRE(r.status == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 42);
  CHECK(lines[0] == "r,B_exact");
  CHECK(lines[1] == "0,2.82842712475");
  double prev = 10.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double b = std::stod(fields(lines[i])[1]);
    CHECK(b < prev);
    prev = b;
  }
  const auto at = run("exact --r-min 0.4911 --r-max 0.4911 --r-step 0.01");
  REQUIRE(at.status == 0);
  CHECK(std::abs(std::stod(fields(data_lines(at.out)[1])[1]) - 2.0) < 1e-3);
  CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("sweep schema and determinism") {
  const auto a = scratch() / "a.csv";
  const auto b = scratch() / "b.csv";
  const std::string args = "sweep --r-max 0.3 --r-step 0.1 --gamma 1 --gamma 0.9 --kcut 10";
  REQUIRE(run(args + " -o " + a.string()).status == 0);
  REQUIRE(run(args + " --jobs 4 -o " + b.string()).status == 0);
  const auto text = slurp(a);
  CHECK(text == slurp(b));
  const auto lines = data_lines(text);
  REQUIRE(lines.size() == 1 + 3 * 2 * 4);
  CHECK(lines[0] == "approach,r,gamma,k_cut,E1,E2,E3,E4,B,boundary_mass,norm_drift,error_flag");
  CHECK(lines[1].rfind("I,0,1,10,nan,", 0) == 0);
  CHECK(fields(lines[1]).back() == "1");
  CHECK(lines.back().rfind("III,0.3,0.9,10,", 0) == 0);
  CHECK(fields(lines.back()).size() == 12);
  CHECK(text.find("# angles=") != std::string::npos);
  CHECK(text.find("k_cut=10") != std::string::npos);
}

TEST_CASE("json mirror") {
  const auto r = run("sweep --r-min 0.1 --r-max 0.2 --r-step 0.1 --approach II --format json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("command") == "sweep");
  REQUIRE(j.at("records").size() == 2);
  CHECK(j.at("records")[0].at("approach") == "II");
  CHECK(j.at("records")[1].at("B").get<double>() > 2.0);
  CHECK(j.at("config").at("k_cut") == 12);
}

TEST_CASE("usage errors exit with status 2 and write nothing") {
  const auto out = scratch() / "never.csv";
  for (const std::string args :
       {"sweep --r-min 0.5 --r-max 0.1", "sweep --r-step 0", "sweep --approach IV",
        "sweep --gamma 1.5", "sweep --kcut 500", "sweep --angles 1,2,3", "sweep --loss-kind air",
        "sweep --bogus", "fullham --r-min 0.6 --r-max 0.8", "probs --kcut 12 --sector 13,1",
        "probs --sector 5", "validate --criterion 12", "replay /nonexistent.json"}) {
    CAPTURE(args);
    const auto r = run(args + " -o " + out.string());
    CHECK(r.status == 2);
    CHECK_FALSE(fs::exists(out));
  }
  CHECK(run("").status == 2);
}

TEST_CASE("probs") {
  const auto r = run("probs --r 0.5 --kcut 20 --sector 6,5 --sector 5,5");
  REQUIRE(r.status == 0);
  const auto lines = data_lines(r.out);
  CHECK(lines[0] == "N_A,N_B,k_A,k_B,p");
  double odd_max = 0.0, even_sum = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = fields(lines[i]);
    const double p = std::stod(f[4]);
    CHECK(p >= 0.0);
    if (f[0] == "6") odd_max = std::max(odd_max, p);
    else even_sum += p;
  }
  CHECK(lines.size() == 1 + 7 * 6 + 6 * 6);
  CHECK(odd_max < 1e-10);
  const auto pos = r.out.find("# sector 5,5 probability=");
  REQUIRE(pos != std::string::npos);
  const double marginal = std::stod(r.out.substr(pos + 25));
  CHECK(even_sum == doctest::Approx(marginal).epsilon(1e-9));
}

TEST_CASE("fullham") {
  const auto r = run("fullham --r-min 0.4 --r-max 0.6 --r-step 0.1 --approach III");
  REQUIRE(r.status == 0);
  CHECK(r.err.find("capped") != std::string::npos);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "approach,r,gamma,k_cut,E1,E2,E3,E4,B,boundary_mass,norm_drift,error_flag,N");
  CHECK(fields(lines[2])[1] == "0.5");
  CHECK(fields(lines[2]).back() == "10");
  CHECK(fields(lines[2])[3] == "10");
}

TEST_CASE("boundary warning") {
  const auto r = run("sweep --r-min 0.4 --r-max 0.4 --approach I --kcut 8");
  CHECK(r.status == 0);
  CHECK(r.err.find("boundary_mass") != std::string::npos);
}

TEST_CASE("configuration replay") {
  const auto cfg = scratch() / "cfg.json";
  const std::string args = "sweep --r-min 0.1 --r-max 0.2 --r-step 0.05 --approach III --gamma 0.8";
  const auto printed = run(args + " --print-config");
  REQUIRE(printed.status == 0);
  std::ofstream(cfg) << printed.out;
  const auto direct = run(args);
  const auto replayed = run("replay " + cfg.string());
  REQUIRE(replayed.status == 0);
  CHECK(direct.out == replayed.out);
}

TEST_CASE("validate") {
  const auto report = scratch() / "report.json";
  const auto r = run("validate --criterion 1 --criterion 9 -o " + report.string());
  CHECK(r.status == 0);
  CHECK(r.out.find("[PASS] 1 closed-form benchmark") != std::string::npos);
  CHECK(r.out.find("[PASS] 9 CH assembly identity") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j.at("passed") == true);
  CHECK(j.at("checks").size() == 2);
  CHECK(j.at("checks")[0].at("measurements").size() >= 3);
}

TEST_CASE("help and version") {
  CHECK(run("--help").status == 0);
  const auto v = run("--version");
  CHECK(v.status == 0);
  CHECK_FALSE(v.out.empty());
}

}
