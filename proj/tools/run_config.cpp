#include "run_config.hpp"

#include <numbers>
#include <stdexcept>

namespace splitbell::cli {

RunConfig RunConfig::defaults() {
  RunConfig c;
  constexpr double pi = std::numbers::pi;
  c.angles = {3.0 * pi / 8.0, pi / 8.0, pi / 4.0, 0.0};
  return c;
}

int default_k_cut(double r_max) { return r_max <= 0.4 + 1e-12 ? 12 : 40; }

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Exact: return "exact";
    case Subcommand::Sweep: return "sweep";
    case Subcommand::Probs: return "probs";
    case Subcommand::Fullham: return "fullham";
    case Subcommand::Validate: return "validate";
  }
  return "?";
}

std::optional<Subcommand> parse_subcommand(const std::string& s) {
  for (auto c : {Subcommand::Exact, Subcommand::Sweep, Subcommand::Probs, Subcommand::Fullham,
                 Subcommand::Validate})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{
      {"subcommand", to_string(c.subcommand)},
      {"r_min", c.r_min},
      {"r_max", c.r_max},
      {"r_step", c.r_step},
      {"gammas", c.gammas},
      {"approaches", c.approaches},
      {"k_cut", c.k_cut ? nlohmann::json(*c.k_cut) : nlohmann::json(nullptr)},
      {"N", c.atoms},
      {"angles", c.angles},
      {"desqueeze_scale", c.desqueeze_scale},
      {"loss_kind", c.loss_kind},
      {"r", c.r},
      {"sectors", c.sectors},
      {"theta_a", c.theta_a},
      {"theta_b", c.theta_b},
      {"criteria", c.criteria},
      {"output", c.output},
      {"format", c.format == Format::Csv ? "csv" : "json"},
      {"jobs", c.jobs},
  };
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  c = RunConfig::defaults();
  if (j.contains("subcommand")) {
    const auto s = parse_subcommand(j.at("subcommand").get<std::string>());
    if (!s) throw std::invalid_argument("unknown subcommand in config");
    c.subcommand = *s;
  }
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  opt("r_min", c.r_min);
  opt("r_max", c.r_max);
  opt("r_step", c.r_step);
  opt("gammas", c.gammas);
  opt("approaches", c.approaches);
  if (j.contains("k_cut")) {
    if (j.at("k_cut").is_null()) c.k_cut.reset();
    else c.k_cut = j.at("k_cut").get<int>();
  }
  opt("N", c.atoms);
  opt("angles", c.angles);
  opt("desqueeze_scale", c.desqueeze_scale);
  opt("loss_kind", c.loss_kind);
  opt("r", c.r);
  opt("sectors", c.sectors);
  opt("theta_a", c.theta_a);
  opt("theta_b", c.theta_b);
  opt("criteria", c.criteria);
  opt("output", c.output);
  if (j.contains("format")) {
    const auto f = j.at("format").get<std::string>();
    if (f == "csv") c.format = Format::Csv;
    else if (f == "json") c.format = Format::Json;
    else throw std::invalid_argument("unknown format in config: " + f);
  }
  opt("jobs", c.jobs);
}

}  // namespace splitbell::cli
