#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace splitbell {

using Amplitude = std::complex<double>;

/// Per-mode occupation ceiling of the four-mode (a_{+1}, a_{-1}, b_{+1},
/// b_{-1}) Fock space. Every mode holds 0..k_cut quanta, so the basis has
/// (k_cut + 1)^4 elements.
class TruncationConfig {
public:
  explicit TruncationConfig(int k_cut);

  int k_cut() const noexcept { return k_cut_; }
  int per_mode() const noexcept { return k_cut_ + 1; }
  std::size_t dimension() const noexcept;

  friend bool operator==(const TruncationConfig&, const TruncationConfig&) = default;

private:
  int k_cut_;
};

/// Occupations of a_{+1}, a_{-1}, b_{+1}, b_{-1}.
struct FockLabel {
  int k_a = 0;
  int l_a = 0;
  int k_b = 0;
  int l_b = 0;

  int n_a() const noexcept { return k_a + l_a; }
  int n_b() const noexcept { return k_b + l_b; }

  friend auto operator<=>(const FockLabel&, const FockLabel&) = default;
};

/// Local particle numbers (N_A, N_B) in the +-1 modes.
struct SectorKey {
  int n_a = 0;
  int n_b = 0;

  friend auto operator<=>(const SectorKey&, const SectorKey&) = default;
};

/// Ordinal of a label. Ordering is lexicographic in (k_A, l_A, k_B, l_B) with
/// l_B fastest. Throws RangeError for out-of-range components.
std::size_t index_of(const FockLabel& label, const TruncationConfig& cfg);

/// Inverse of index_of. Throws RangeError when ordinal >= dimension.
FockLabel label_of(std::size_t ordinal, const TruncationConfig& cfg);

/// Dense amplitude vector over the truncated basis.
class StateVector {
public:
  /// Zero vector.
  explicit StateVector(const TruncationConfig& cfg);
  StateVector(const TruncationConfig& cfg, std::vector<Amplitude> amplitudes);

  static StateVector vacuum(const TruncationConfig& cfg);
  /// Unit amplitude on a single basis label.
  static StateVector basis(const TruncationConfig& cfg, const FockLabel& label);

  const TruncationConfig& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return amps_.size(); }

  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  std::span<Amplitude> amplitudes() noexcept { return amps_; }

  Amplitude operator[](std::size_t i) const { return amps_[i]; }
  Amplitude& operator[](std::size_t i) { return amps_[i]; }

  Amplitude at(const FockLabel& label) const { return amps_[index_of(label, cfg_)]; }
  Amplitude& at(const FockLabel& label) { return amps_[index_of(label, cfg_)]; }

  void scale(Amplitude factor) noexcept;

private:
  TruncationConfig cfg_;
  std::vector<Amplitude> amps_;
};

/// Euclidean norm of the amplitude vector.
double norm(const StateVector& state);

/// Total probability on labels with any occupation equal to k_cut.
double boundary_mass(const StateVector& state);

/// Probability per (N_A, N_B) sector; sums to norm^2.
std::map<SectorKey, double> sector_marginal(const StateVector& state);

/// Boundary-mass level above which a truncation is considered unconverged.
inline constexpr double kBoundaryWarning = 1e-8;

}  // namespace splitbell
