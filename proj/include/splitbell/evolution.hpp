#pragma once

#include "splitbell/fockspace.hpp"
#include "splitbell/operators.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace splitbell {

/// Tolerances of the embedded Dormand-Prince 5(4) pair. The local error
/// estimate is measured in the Euclidean norm of the whole state vector.
struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 200000;

  void validate() const;
};

/// Squeezing strength r = gNt and the multiplier on the local desqueezing
/// duration (1 is the ideal protocol).
struct PrepParams {
  double r = 0.0;
  double desqueeze_scale = 1.0;

  void validate() const;
};

/// Solves i d|psi>/ds = G|psi> from s = 0 to s = parameter (either sign).
/// Throws IntegrationError when max_steps is exhausted.
std::vector<Amplitude> evolve(std::span<const Amplitude> initial, const SparseGenerator& generator,
                              double parameter, const IntegratorConfig& cfg = {});

StateVector evolve(const StateVector& state, const SparseGenerator& generator, double parameter,
                   const IntegratorConfig& cfg = {});

/// Output of the preparation sequence plus the diagnostics needed to audit it.
struct PreparedState {
  StateVector state;
  /// |norm - 1| before the single final renormalization.
  double norm_drift = 0.0;
  /// boundary_mass of the final state.
  double boundary_mass = 0.0;
  /// Largest boundary_mass seen after any stage (the 2r-squeezed
  /// intermediate is usually the worst).
  double max_stage_boundary_mass = 0.0;
};

/// Where the preparation is propagated. The vacuum and every stage live in
/// the zero-imbalance subspace, so both choices yield the same state; the
/// full-space run is the reference and costs ~60x more at k_cut = 40.
enum class PrepBasis { ImbalanceSubspace, Full };

/// Squeeze by 2r, pi-gate, split by pi/4, then squeeze each well by
/// desqueeze_scale * r, starting from the vacuum.
PreparedState prepare_bell_state(const PrepParams& params, const TruncationConfig& cfg,
                                 const IntegratorConfig& integrator = {},
                                 PrepBasis basis = PrepBasis::ImbalanceSubspace);

/// sech(r) (-i tanh r)^k on labels (k, k, 0, 0), k <= k_cut.
StateVector tms_closed_form(double r, const TruncationConfig& cfg);

/// exp(-i theta S^y) of one well, precomputed per particle-number sector.
/// Blocks are real. Complete sectors (N <= k_cut) use the binomial beamsplitter
/// expansion; sectors clipped by the per-mode ceiling use the exponential of
/// the generator restricted to the surviving labels, which is what the
/// truncated ODE produces.
class WellRotation {
public:
  WellRotation(double theta, const TruncationConfig& cfg);

  double theta() const noexcept { return theta_; }

  /// First +1-mode occupation of sector n (labels k = first..first+size-1).
  int first(int n) const noexcept;
  int size(int n) const noexcept;

  /// Element <k_out, n-k_out| V |k_in, n-k_in>.
  double element(int n, int k_out, int k_in) const;

  /// Row-major size(n) x size(n) block of sector n.
  std::span<const double> block(int n) const;

  /// Applies the block of sector n to a vector of length size(n) in place.
  void apply_block(int n, std::span<double> re, std::span<double> im) const;

private:
  double theta_;
  int k_cut_;
  std::vector<std::vector<double>> blocks_;
};

/// Binomial-expansion element of a complete sector (used for tests too).
double rotation_element_binomial(double theta, int n, int k_out, int k_in);

/// V(theta_A, theta_B) |state>, analytic.
StateVector rotate(const StateVector& state, double theta_a, double theta_b);

/// Same map using precomputed blocks (both must match the state's k_cut).
StateVector rotate(const StateVector& state, const WellRotation& rot_a, const WellRotation& rot_b);

}  // namespace splitbell
