#pragma once

#include "splitbell/correlators.hpp"
#include "splitbell/evolution.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splitbell {

struct BellAngles {
  double theta_a = 0.0;
  double theta_a_prime = 0.0;
  double theta_b = 0.0;
  double theta_b_prime = 0.0;

  /// (3pi/8, pi/8, pi/4, 0).
  static BellAngles optimal();

  /// Angle pairs in record order: (A,B), (A',B), (A,B'), (A',B').
  std::array<std::pair<double, double>, 4> settings() const;
};

enum class Approach { I, II, III };

std::string_view approach_name(Approach a);
std::optional<Approach> parse_approach(std::string_view name);

enum class RecordError { None = 0, UndefinedCorrelator = 1, IntegrationFailure = 2 };

/// One (approach, gamma, r) point. E follows BellAngles::settings() order and
/// B = E[0] + E[1] + E[2] - E[3]. On error E and B are NaN.
struct SweepRecord {
  Approach approach = Approach::I;
  double r = 0.0;
  double gamma = 1.0;
  int k_cut = 0;
  std::optional<int> atoms;  ///< set by the exact-Hamiltonian runs
  std::array<double, 4> E{};
  double B = 0.0;
  double boundary_mass = 0.0;
  double norm_drift = 0.0;
  RecordError error = RecordError::None;
  std::string message;

  bool ok() const noexcept { return error == RecordError::None; }
};

/// Probability tables of one state at the four settings.
using SettingTables = std::array<ProbabilityTable, 4>;

SettingTables setting_tables(const StateVector& state, const BellAngles& angles);

/// E for one table.
double correlator(const ProbabilityTable& table, Approach approach, const LossModel& loss);

/// Fills E, B and the error fields of `record` from the four tables.
void evaluate(const SettingTables& tables, const LossModel& loss, SweepRecord& record);

/// Prepares the state once and evaluates one approach.
SweepRecord chsh_value(const PrepParams& prep, const BellAngles& angles, Approach approach,
                       const LossModel& loss, const TruncationConfig& cfg,
                       const IntegratorConfig& integrator = {});

/// 4 sqrt(2) cosh^2 r / (3 cosh 2r - 1).
double exact_chsh(double r);

/// Root of exact_chsh(r) = 2 by bisection to 1e-10.
double violation_threshold();

/// B rebuilt from CH probabilities: sum over the four inequalities
/// (++ and -- with sign +1, +- and -+ with sign -1) of
/// P(A,B) + P(A,B') + P(A',B) - P(A',B'), divided by P^{forall forall}.
double chsh_from_ch(const std::array<ChProbabilities, 4>& settings);

struct SweepSpec {
  std::vector<double> r_values;
  std::vector<double> gammas{1.0};
  std::vector<Approach> approaches{Approach::I, Approach::II, Approach::III};
  int k_cut = 12;
  BellAngles angles = BellAngles::optimal();
  double desqueeze_scale = 1.0;
  LossKind loss_kind = LossKind::Loss;
  IntegratorConfig integrator;
  int jobs = 1;

  void validate() const;
};

/// Records ordered by (approach, gamma, r), each as listed in the SweepSpec.
/// Each r is prepared once; failures are recorded, never thrown.
std::vector<SweepRecord> sweep(const SweepSpec& spec);

/// r_min, r_min + step, ... up to r_max inclusive (1e-9 slack). Grid values
/// are computed as r_min + i * step, rounded to 12 decimals.
std::vector<double> make_grid(double r_min, double r_max, double r_step);

}  // namespace splitbell
