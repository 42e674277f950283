#include "splitbell/fockspace.hpp"

#include "splitbell/error.hpp"

#include <cmath>
#include <string>

namespace splitbell {

TruncationConfig::TruncationConfig(int k_cut) : k_cut_(k_cut) {
  if (k_cut < 1) {
    throw RangeError("k_cut must be at least 1, got " + std::to_string(k_cut));
  }
  // (k_cut+1)^4 must stay addressable with 32-bit column indices
  if (k_cut > 200) {
    throw RangeError("k_cut must not exceed 200, got " + std::to_string(k_cut));
  }
}

std::size_t TruncationConfig::dimension() const noexcept {
  const auto d = static_cast<std::size_t>(per_mode());
  return d * d * d * d;
}

std::size_t index_of(const FockLabel& label, const TruncationConfig& cfg) {
  const int kc = cfg.k_cut();
  for (int c : {label.k_a, label.l_a, label.k_b, label.l_b}) {
    if (c < 0 || c > kc) {
      throw RangeError("label component " + std::to_string(c) + " outside [0, " +
                       std::to_string(kc) + "]");
    }
  }
  const auto d = static_cast<std::size_t>(cfg.per_mode());
  return ((static_cast<std::size_t>(label.k_a) * d + label.l_a) * d + label.k_b) * d +
         label.l_b;
}

FockLabel label_of(std::size_t ordinal, const TruncationConfig& cfg) {
  if (ordinal >= cfg.dimension()) {
    throw RangeError("ordinal " + std::to_string(ordinal) + " outside basis of dimension " +
                     std::to_string(cfg.dimension()));
  }
  const auto d = static_cast<std::size_t>(cfg.per_mode());
  FockLabel label;
  label.l_b = static_cast<int>(ordinal % d);
  ordinal /= d;
  label.k_b = static_cast<int>(ordinal % d);
  ordinal /= d;
  label.l_a = static_cast<int>(ordinal % d);
  label.k_a = static_cast<int>(ordinal / d);
  return label;
}

StateVector::StateVector(const TruncationConfig& cfg)
    : cfg_(cfg), amps_(cfg.dimension(), Amplitude{0.0, 0.0}) {}

StateVector::StateVector(const TruncationConfig& cfg, std::vector<Amplitude> amplitudes)
    : cfg_(cfg), amps_(std::move(amplitudes)) {
  if (amps_.size() != cfg_.dimension()) {
    throw RangeError("amplitude vector of length " + std::to_string(amps_.size()) +
                     " does not match basis dimension " + std::to_string(cfg_.dimension()));
  }
}

StateVector StateVector::vacuum(const TruncationConfig& cfg) {
  StateVector s(cfg);
  s.amps_[0] = 1.0;
  return s;
}

StateVector StateVector::basis(const TruncationConfig& cfg, const FockLabel& label) {
  StateVector s(cfg);
  s.at(label) = 1.0;
  return s;
}

void StateVector::scale(Amplitude factor) noexcept {
  for (auto& a : amps_) a *= factor;
}

double norm(const StateVector& state) {
  double sum = 0.0;
  for (const auto& a : state.amplitudes()) sum += std::norm(a);
  return std::sqrt(sum);
}

double boundary_mass(const StateVector& state) {
  const int kc = state.config().k_cut();
  const int d = state.config().per_mode();
  const auto amps = state.amplitudes();
  double mass = 0.0;
  std::size_t i = 0;
  for (int ka = 0; ka < d; ++ka)
    for (int la = 0; la < d; ++la)
      for (int kb = 0; kb < d; ++kb)
        for (int lb = 0; lb < d; ++lb, ++i) {
          if (ka == kc || la == kc || kb == kc || lb == kc) mass += std::norm(amps[i]);
        }
  return mass;
}

std::map<SectorKey, double> sector_marginal(const StateVector& state) {
  const int d = state.config().per_mode();
  const auto amps = state.amplitudes();
  // dense accumulator over (N_A, N_B) in [0, 2 k_cut]^2
  const int span = 2 * d - 1;
  std::vector<double> acc(static_cast<std::size_t>(span) * span, 0.0);
  std::size_t i = 0;
  for (int ka = 0; ka < d; ++ka)
    for (int la = 0; la < d; ++la)
      for (int kb = 0; kb < d; ++kb)
        for (int lb = 0; lb < d; ++lb, ++i) {
          acc[static_cast<std::size_t>(ka + la) * span + (kb + lb)] += std::norm(amps[i]);
        }
  std::map<SectorKey, double> out;
  for (int na = 0; na < span; ++na)
    for (int nb = 0; nb < span; ++nb) {
      const double p = acc[static_cast<std::size_t>(na) * span + nb];
      if (p > 0.0) out.emplace(SectorKey{na, nb}, p);
    }
  return out;
}

}  // namespace splitbell
