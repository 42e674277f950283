#include "run_config.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

using namespace splitbell::cli;

TEST_SUITE("runconfig") {

TEST_CASE("defaults") {
  const auto c = RunConfig::defaults();
  CHECK(c.r_max == 0.8);
  CHECK(c.r_step == 0.02);
  CHECK(c.angles[0] == doctest::Approx(1.1780972450961724));
  CHECK(c.angles[3] == 0.0);
  CHECK(c.sectors.size() == 4);
  CHECK(c.atoms == 10);
  CHECK_FALSE(c.k_cut.has_value());
  CHECK(default_k_cut(0.4) == 12);
  CHECK(default_k_cut(0.42) == 40);
}

TEST_CASE("json round trip") {
  auto c = RunConfig::defaults();
  c.subcommand = Subcommand::Fullham;
  c.gammas = {1.0, 0.9, 0.7};
  c.approaches = {"III"};
  c.k_cut = 17;
  c.atoms = 8;
  c.sectors = {{6, 5}};
  c.criteria = {2, 4};
  c.output = "out.csv";
  c.format = Format::Json;
  c.jobs = 3;
  const nlohmann::json j = c;
  CHECK(j.at("N") == 8);
  const auto back = j.get<RunConfig>();
  CHECK(nlohmann::json(back) == j);
  CHECK(back.k_cut == 17);
  CHECK(back.subcommand == Subcommand::Fullham);

  c.k_cut.reset();
  const nlohmann::json unset = c;
  CHECK(unset.at("k_cut").is_null());
  CHECK_FALSE(unset.get<RunConfig>().k_cut.has_value());
}

TEST_CASE("partial and malformed documents") {
  const auto partial = nlohmann::json{{"subcommand", "exact"}, {"r_max", 0.3}}.get<RunConfig>();
  CHECK(partial.subcommand == Subcommand::Exact);
  CHECK(partial.r_max == 0.3);
  CHECK(partial.r_step == 0.02);
  CHECK_THROWS(nlohmann::json{{"subcommand", "plot"}}.get<RunConfig>());
  CHECK_THROWS(nlohmann::json{{"format", "xml"}}.get<RunConfig>());
  CHECK_THROWS(nlohmann::json{{"r_max", "high"}}.get<RunConfig>());
}

TEST_CASE("subcommand names") {
  for (auto s : {Subcommand::Exact, Subcommand::Sweep, Subcommand::Probs, Subcommand::Fullham,
                 Subcommand::Validate})
    CHECK(parse_subcommand(to_string(s)) == s);
  CHECK_FALSE(parse_subcommand("replay").has_value());
}

}
