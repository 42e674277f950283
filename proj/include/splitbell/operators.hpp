#pragma once

#include "splitbell/fockspace.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace splitbell {

/// Hermitian operator stored in compressed sparse row form. The basis is
/// whatever the producer enumerated; only the dimension is recorded.
class SparseGenerator {
public:
  struct Entry {
    std::size_t row = 0;
    std::size_t col = 0;
    Amplitude value;
  };

  SparseGenerator() = default;

  /// Builds from a triplet list. Duplicate (row, col) pairs are summed and
  /// exact zeros dropped, so the stored form never repeats a position.
  static SparseGenerator from_entries(std::size_t dim, std::vector<Entry> entries);

  /// Real diagonal operator.
  static SparseGenerator diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::vector<Entry> entries() const;

  /// Matrix element <row|G|col>; zero when not stored.
  Amplitude element(std::size_t row, std::size_t col) const;

  /// out = factor * G * in. `out` must not alias `in`.
  void apply(std::span<const Amplitude> in, std::span<Amplitude> out,
             Amplitude factor = {1.0, 0.0}) const;

  /// Entry-level check that (j, i, conj(c)) is stored for every (i, j, c).
  bool is_hermitian(double tol = 0.0) const;

  SparseGenerator operator*(const SparseGenerator& rhs) const;
  SparseGenerator operator-(const SparseGenerator& rhs) const;

  /// Frobenius norm of the stored matrix.
  double frobenius_norm() const;

private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<Amplitude> values_;
};

/// Frobenius norm of [a, b].
double commutator_norm(const SparseGenerator& a, const SparseGenerator& b);

enum class Well { A, B };

/// a1^dag a-1^dag + a1 a-1 on the A modes. Dimensionless; the evolution
/// parameter supplies r.
SparseGenerator gen_tms_global(const TruncationConfig& cfg);

/// Two-mode squeezing generator on the chosen well's +-1 modes.
SparseGenerator gen_tms_local(const TruncationConfig& cfg, Well well);

/// Spatial splitting generator sum_{m=+-1} (-i a_m^dag b_m + i b_m^dag a_m).
/// Evolving by pi/4 sends a_m^dag -> (a_m^dag + b_m^dag)/sqrt(2).
SparseGenerator gen_split(const TruncationConfig& cfg);

/// S^y of one well: -i a-1^dag a1 + i a1^dag a-1 (or the b-mode analog).
SparseGenerator gen_rotation_y(const TruncationConfig& cfg, Well well);

/// Multiplies the amplitude at each label by (-1)^(k_A + k_B).
StateVector apply_pi_gate(StateVector state);

enum class GeneratorKind { TmsGlobal, TmsLocalA, TmsLocalB, Split, RotationA, RotationB };

/// Generator assembled once per (kind, k_cut) and shared afterwards.
std::shared_ptr<const SparseGenerator> cached_generator(GeneratorKind kind,
                                                        const TruncationConfig& cfg);

/// Labels sharing one value of (k_A + k_B) - (l_A + l_B). Every generator of
/// the preparation sequence and both rotations leave these subspaces
/// invariant, so a state starting in one never leaves it.
class ImbalanceSubspace {
public:
  explicit ImbalanceSubspace(const TruncationConfig& cfg, int imbalance = 0);

  const TruncationConfig& config() const noexcept { return cfg_; }
  int imbalance() const noexcept { return imbalance_; }
  std::size_t size() const noexcept { return full_.size(); }

  /// Full-basis ordinal of subspace element i (increasing in i).
  std::size_t full_index(std::size_t i) const { return full_[i]; }
  std::optional<std::size_t> local_index(std::size_t full) const;

  std::vector<Amplitude> restrict(std::span<const Amplitude> full) const;
  StateVector embed(std::span<const Amplitude> sub) const;

private:
  TruncationConfig cfg_;
  int imbalance_;
  std::vector<std::size_t> full_;
  std::vector<std::int32_t> local_;
};

/// Generator of the given kind restricted to a subspace, in the subspace's
/// own ordering.
SparseGenerator restricted_generator(GeneratorKind kind, const ImbalanceSubspace& sub);

std::shared_ptr<const SparseGenerator> cached_generator(GeneratorKind kind,
                                                        const ImbalanceSubspace& sub);

/// Drops every cached generator (they dominate memory at large k_cut).
void clear_generator_cache();

enum class ObservableKind { SzA, SzB, NA, NB };

/// Number-diagonal observable over the four-mode basis.
struct ObservableDiag {
  std::vector<double> values;
};

ObservableDiag observable(ObservableKind kind, const TruncationConfig& cfg);

/// <psi|O|psi> for a diagonal observable.
double expectation(const ObservableDiag& op, const StateVector& state);

/// Diagonal operator (k_A + k_B) - (l_A + l_B), conserved by every stage of
/// the preparation sequence.
SparseGenerator pair_imbalance_operator(const TruncationConfig& cfg);

}  // namespace splitbell
