#pragma once

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace splitbell::cli {

enum class Subcommand { Exact, Sweep, Probs, Fullham, Validate };
enum class Format { Csv, Json };

/// Everything a CLI invocation needs; serializable so that a run can be
/// recorded and replayed.
struct RunConfig {
  Subcommand subcommand = Subcommand::Sweep;
  double r_min = 0.0;
  double r_max = 0.8;
  double r_step = 0.02;
  std::vector<double> gammas{1.0};
  std::vector<std::string> approaches{"I", "II", "III"};
  std::optional<int> k_cut;  ///< unset: chosen from the largest r
  int atoms = 10;
  std::array<double, 4> angles{};  ///< theta_A, theta_A', theta_B, theta_B'
  double desqueeze_scale = 1.0;
  std::string loss_kind = "loss";
  double r = 0.5;  ///< probs
  std::vector<std::pair<int, int>> sectors{{5, 5}, {7, 7}, {11, 11}, {7, 5}};
  double theta_a = 0.0;
  double theta_b = 0.0;
  std::vector<int> criteria;  ///< validate; empty = all
  std::string output;         ///< empty = stdout
  Format format = Format::Csv;
  int jobs = 1;

  static RunConfig defaults();
};

/// k_cut used when none is given: 12 up to r = 0.4, 40 beyond.
int default_k_cut(double r_max);

/// Largest r the exact-Hamiltonian runs accept.
constexpr double kFullhamMaxR = 0.5;

std::string to_string(Subcommand s);
std::optional<Subcommand> parse_subcommand(const std::string& s);

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

}  // namespace splitbell::cli
