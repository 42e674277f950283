#pragma once

#include "splitbell/evolution.hpp"
#include "splitbell/fockspace.hpp"

#include <vector>

namespace splitbell {

/// Born-rule probabilities over the four-mode basis for one pair of
/// measurement angles. Entries are non-negative and sum to one within 1e-8.
class ProbabilityTable {
public:
  ProbabilityTable(const TruncationConfig& cfg, std::vector<double> probs, double theta_a = 0.0,
                   double theta_b = 0.0);

  /// All mass on a single label.
  static ProbabilityTable point(const TruncationConfig& cfg, const FockLabel& label);

  const TruncationConfig& config() const noexcept { return cfg_; }
  double theta_a() const noexcept { return theta_a_; }
  double theta_b() const noexcept { return theta_b_; }

  const std::vector<double>& probs() const noexcept { return probs_; }
  double at(const FockLabel& label) const { return probs_[index_of(label, cfg_)]; }

  double total() const;

  static constexpr double kNormTolerance = 1e-8;

private:
  TruncationConfig cfg_;
  std::vector<double> probs_;
  double theta_a_;
  double theta_b_;
};

/// |<l| V(theta_A, theta_B) |state>|^2 for every label l.
ProbabilityTable probability_table(const StateVector& state, double theta_a, double theta_b);
ProbabilityTable probability_table(const StateVector& state, const WellRotation& rot_a,
                                   const WellRotation& rot_b);

/// Two-valued sign with the zero bin assigned to +1.
constexpr int sign_binned(int x) noexcept { return x >= 0 ? 1 : -1; }

/// Normalized-average correlator: sum p (k_A-l_A)(k_B-l_B) / sum p (k_A+l_A)(k_B+l_B).
/// Throws UndefinedCorrelator when the denominator vanishes.
double correlator_I(const ProbabilityTable& table);

/// Sign-binned correlator averaged over every outcome, vacuum included.
double correlator_II(const ProbabilityTable& table);

/// Sign-binned correlator over coincidences only (local vacua excluded),
/// normalized by <Pi>. Throws UndefinedCorrelator when <Pi> vanishes.
double correlator_III(const ProbabilityTable& table);

/// Coincidence probabilities of the CH inequality at one angle pair. The '+'
/// region is k >= l without the local vacuum; the '-' region is k < l.
struct ChProbabilities {
  double pp = 0.0;  ///< P^{++}
  double pm = 0.0;  ///< P^{+-}
  double mp = 0.0;  ///< P^{-+}
  double mm = 0.0;  ///< P^{--}
  double all_all = 0.0;    ///< P^{forall forall}
  double plus_all = 0.0;   ///< P^{+ forall}
  double minus_all = 0.0;  ///< P^{- forall}
  double all_plus = 0.0;   ///< P^{forall +}
  double all_minus = 0.0;  ///< P^{forall -}
};

ChProbabilities ch_probabilities(const ProbabilityTable& table);

enum class LossKind { Loss, DetectorInefficiency };

/// Per-atom survival probability (gamma) or detection efficiency (eta).
struct LossModel {
  double survival = 1.0;
  LossKind kind = LossKind::Loss;

  static LossModel ideal() { return {}; }
  static LossModel loss(double gamma) { return {gamma, LossKind::Loss}; }
  static LossModel detector(double eta) { return {eta, LossKind::DetectorInefficiency}; }

  void validate() const;
};

/// <k-n|F_n|k> = sqrt(C(k,n) gamma^(k-n) (1-gamma)^n); zero when n > k.
double kraus_amplitude(int k, int n, double gamma);

/// Loss-averaged sign of the readout spin for true occupations (k, l).
double G_factor(int k, int l, double gamma);

/// Probability that both modes of a well are emptied: (1-gamma)^(k+l).
double H_factor(int k, int l, double gamma);

/// Identical to correlator_I: the survival factors cancel between numerator
/// and denominator.
double correlator_I_loss(const ProbabilityTable& table, const LossModel& loss);

/// sum p G_{k_A l_A} G_{k_B l_B}.
double correlator_II_loss(const ProbabilityTable& table, const LossModel& loss);

/// Coincidence correlator after loss. Numerator and denominator are the
/// trace terms Tr(sgn sgn rho) - Tr(Pi0_A sgn rho) - Tr(sgn Pi0_B rho) + <0|rho|0>
/// and Tr(Pi rho), each a sum over the table with G/H weights.
double correlator_III_loss(const ProbabilityTable& table, const LossModel& loss);

/// Readout distribution after independent binomial loss on each of the four
/// modes. Reference path for the closed-form loss correlators.
ProbabilityTable lossy_probability_table(const ProbabilityTable& table, const LossModel& loss);

/// Detector-inefficiency forms; the same expressions with gamma -> eta.
double correlator_I_detector(const ProbabilityTable& table, double eta);
double correlator_II_detector(const ProbabilityTable& table, double eta);
double correlator_III_detector(const ProbabilityTable& table, double eta);

}  // namespace splitbell
