#pragma once

#include "splitbell/bell.hpp"
#include "splitbell/correlators.hpp"
#include "splitbell/evolution.hpp"
#include "splitbell/operators.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace splitbell {

/// Occupations of (a1, a-1, a0, b1, b-1, b0).
using OccupationLabel6 = std::array<int, 6>;

/// All six-mode occupations with a fixed total N, in lexicographic order of
/// (n_a1, n_a-1, n_a0, n_b1, n_b-1, n_b0) with n_b0 fastest.
class NumberConservedBasis {
public:
  explicit NumberConservedBasis(int atoms);

  int atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return labels_.size(); }

  const OccupationLabel6& occupations(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> find(const OccupationLabel6& occ) const;
  /// Throws RangeError for labels outside the basis.
  std::size_t index_of(const OccupationLabel6& occ) const;

private:
  std::uint64_t key(const OccupationLabel6& occ) const;

  int atoms_;
  std::vector<OccupationLabel6> labels_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

enum class SccScope { Global, A, B };

/// (1/N)(a-1^dag a1^dag a0 a0 + h.c.) on the A modes (Global and A) or the
/// B modes. Evolving by 2r from all atoms in a0 reproduces two-mode squeezing
/// by r in the large-N limit.
SparseGenerator gen_exact_scc(const NumberConservedBasis& basis, SccScope scope);

/// Splitting generator summed over the m = 1, -1, 0 mode pairs.
SparseGenerator gen_split6(const NumberConservedBasis& basis);

struct FullState {
  std::shared_ptr<const NumberConservedBasis> basis;
  std::vector<Amplitude> amplitudes;
  double norm_drift = 0.0;
};

/// Squeeze by 2r, pi-gate (-1)^(n_a1 + n_b1), split by pi/4, then squeeze
/// each well with its own a0/b0 by desqueeze_scale * 2r; starts with all
/// atoms in a0.
FullState prepare_full(double r, int atoms, double desqueeze_scale = 1.0,
                       const IntegratorConfig& integrator = {});

/// Four-mode readout table (ceiling N) after rotating the +-1 modes of each
/// well; the m = 0 occupations are traced out.
ProbabilityTable reduced_probability_table(const FullState& state, double theta_a, double theta_b);

SettingTables reduced_setting_tables(const FullState& state, const BellAngles& angles);

/// Probability of each (N_A, N_B) sector of the +-1 modes.
std::map<SectorKey, double> reduced_sector_marginal(const FullState& state);

/// Mass on labels where some +-1 mode holds all N atoms.
double reduced_boundary_mass(const FullState& state);

struct FullHamSpec {
  std::vector<double> r_values;
  std::vector<double> gammas{1.0};
  std::vector<Approach> approaches{Approach::I, Approach::II, Approach::III};
  int atoms = 10;
  BellAngles angles = BellAngles::optimal();
  double desqueeze_scale = 1.0;
  LossKind loss_kind = LossKind::Loss;
  IntegratorConfig integrator;
  int jobs = 1;

  void validate() const;
};

/// Same ordering and error policy as sweep(); records carry atoms = N and
/// k_cut = N.
std::vector<SweepRecord> fullham_sweep(const FullHamSpec& spec);

}  // namespace splitbell
