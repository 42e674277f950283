#include "splitbell/exacthamiltonian.hpp"

#include "ladder.hpp"
#include "parallel.hpp"
#include "splitbell/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace splitbell {

namespace {

constexpr int kA1 = 0, kAm1 = 1, kA0 = 2, kB1 = 3, kBm1 = 4, kB0 = 5;
constexpr int kMaxAtoms = 60;

using Term6 = detail::LadderTerm<6>;

// coef * a_p^dag a_q^dag a_z a_z and its conjugate
std::vector<Term6> scc_terms(int plus, int minus, int zero, double coef) {
  Term6 up{{coef, 0.0}};
  up.create[plus] = 1;
  up.create[minus] = 1;
  up.annihilate[zero] = 2;
  Term6 down{{coef, 0.0}};
  down.create[zero] = 2;
  down.annihilate[plus] = 1;
  down.annihilate[minus] = 1;
  return {up, down};
}

}  // namespace

NumberConservedBasis::NumberConservedBasis(int atoms) : atoms_(atoms) {
  if (atoms < 2 || atoms > kMaxAtoms) {
    throw RangeError("atom number must lie in [2, " + std::to_string(kMaxAtoms) + "], got " +
                     std::to_string(atoms));
  }
  OccupationLabel6 occ{};
  // compositions of N into six parts, first part slowest
  auto recurse = [&](auto&& self, int mode, int left) -> void {
    if (mode == 5) {
      occ[5] = left;
      index_.emplace(key(occ), labels_.size());
      labels_.push_back(occ);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      occ[static_cast<std::size_t>(mode)] = n;
      self(self, mode + 1, left - n);
    }
  };
  recurse(recurse, 0, atoms);
}

std::uint64_t NumberConservedBasis::key(const OccupationLabel6& occ) const {
  std::uint64_t k = 0;
  for (int n : occ) k = k * static_cast<std::uint64_t>(atoms_ + 1) + static_cast<std::uint64_t>(n);
  return k;
}

std::optional<std::size_t> NumberConservedBasis::find(const OccupationLabel6& occ) const {
  int total = 0;
  for (int n : occ) {
    if (n < 0 || n > atoms_) return std::nullopt;
    total += n;
  }
  if (total != atoms_) return std::nullopt;
  return index_.at(key(occ));
}

std::size_t NumberConservedBasis::index_of(const OccupationLabel6& occ) const {
  const auto i = find(occ);
  if (!i) throw RangeError("occupation label outside the fixed-N basis");
  return *i;
}

SparseGenerator gen_exact_scc(const NumberConservedBasis& basis, SccScope scope) {
  const double coef = 1.0 / basis.atoms();
  const auto terms = scope == SccScope::B ? scc_terms(kB1, kBm1, kB0, coef)
                                          : scc_terms(kA1, kAm1, kA0, coef);
  return detail::assemble<6>(basis, terms);
}

SparseGenerator gen_split6(const NumberConservedBasis& basis) {
  const Amplitude i{0.0, 1.0};
  std::vector<Term6> terms;
  for (auto [a, b] : {std::pair{kA1, kB1}, std::pair{kAm1, kBm1}, std::pair{kA0, kB0}}) {
    Term6 ab{-i};
    ab.create[a] = 1;
    ab.annihilate[b] = 1;
    Term6 ba{i};
    ba.create[b] = 1;
    ba.annihilate[a] = 1;
    terms.push_back(ab);
    terms.push_back(ba);
  }
  return detail::assemble<6>(basis, terms);
}

FullState prepare_full(double r, int atoms, double desqueeze_scale,
                       const IntegratorConfig& integrator) {
  PrepParams{r, desqueeze_scale}.validate();
  if (atoms < 4) throw RangeError("exact preparation needs at least 4 atoms");
  integrator.validate();

  auto basis = std::make_shared<const NumberConservedBasis>(atoms);
  FullState out{basis, std::vector<Amplitude>(basis->size(), Amplitude{0.0, 0.0})};
  out.amplitudes[basis->index_of({0, 0, atoms, 0, 0, 0})] = 1.0;

  auto& psi = out.amplitudes;
  psi = evolve(psi, gen_exact_scc(*basis, SccScope::Global), 2.0 * r, integrator);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto& occ = basis->occupations(i);
    if ((occ[kA1] + occ[kB1]) % 2 != 0) psi[i] = -psi[i];
  }
  psi = evolve(psi, gen_split6(*basis), std::numbers::pi / 4.0, integrator);
  psi = evolve(psi, gen_exact_scc(*basis, SccScope::A), desqueeze_scale * 2.0 * r, integrator);
  psi = evolve(psi, gen_exact_scc(*basis, SccScope::B), desqueeze_scale * 2.0 * r, integrator);

  double n2 = 0.0;
  for (const auto& a : psi) n2 += std::norm(a);
  const double nrm = std::sqrt(n2);
  out.norm_drift = std::abs(nrm - 1.0);
  for (auto& a : psi) a /= nrm;
  return out;
}

namespace {

// Groups basis indices by (n_a0, n_b0); within a group the +-1 occupations
// identify a four-mode label of ceiling N.
struct CondensateSlices {
  int atoms;
  std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, FockLabel>>> groups;

  explicit CondensateSlices(const NumberConservedBasis& basis) : atoms(basis.atoms()) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const auto& o = basis.occupations(i);
      groups[{o[kA0], o[kB0]}].push_back({i, FockLabel{o[kA1], o[kAm1], o[kB1], o[kBm1]}});
    }
  }
};

std::vector<ProbabilityTable> reduced_tables(const FullState& state,
                                             std::span<const std::pair<double, double>> settings) {
  if (!state.basis) throw RangeError("full state has no basis");
  const TruncationConfig cfg(state.basis->atoms());
  const CondensateSlices slices(*state.basis);

  std::vector<std::pair<WellRotation, WellRotation>> rotations;
  for (auto [ta, tb] : settings) rotations.emplace_back(WellRotation(ta, cfg), WellRotation(tb, cfg));
  std::vector<std::vector<double>> probs(settings.size(), std::vector<double>(cfg.dimension(), 0.0));

  for (const auto& [key, members] : slices.groups) {
    StateVector slice(cfg);
    for (const auto& [i, label] : members) slice.at(label) = state.amplitudes[i];
    for (std::size_t s = 0; s < settings.size(); ++s) {
      const StateVector rotated = rotate(slice, rotations[s].first, rotations[s].second);
      for (std::size_t j = 0; j < rotated.size(); ++j) probs[s][j] += std::norm(rotated[j]);
    }
  }
  std::vector<ProbabilityTable> out;
  for (std::size_t s = 0; s < settings.size(); ++s)
    out.emplace_back(cfg, std::move(probs[s]), settings[s].first, settings[s].second);
  return out;
}

}  // namespace

ProbabilityTable reduced_probability_table(const FullState& state, double theta_a, double theta_b) {
  const std::pair<double, double> setting{theta_a, theta_b};
  return std::move(reduced_tables(state, {&setting, 1}).front());
}

SettingTables reduced_setting_tables(const FullState& state, const BellAngles& angles) {
  const auto settings = angles.settings();
  auto t = reduced_tables(state, settings);
  return {std::move(t[0]), std::move(t[1]), std::move(t[2]), std::move(t[3])};
}

std::map<SectorKey, double> reduced_sector_marginal(const FullState& state) {
  std::map<SectorKey, double> out;
  for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
    const double p = std::norm(state.amplitudes[i]);
    if (p == 0.0) continue;
    const auto& o = state.basis->occupations(i);
    out[SectorKey{o[kA1] + o[kAm1], o[kB1] + o[kBm1]}] += p;
  }
  return out;
}

double reduced_boundary_mass(const FullState& state) {
  const int top = state.basis->atoms();
  double m = 0.0;
  for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
    const auto& o = state.basis->occupations(i);
    if (o[kA1] == top || o[kAm1] == top || o[kB1] == top || o[kBm1] == top)
      m += std::norm(state.amplitudes[i]);
  }
  return m;
}

void FullHamSpec::validate() const {
  if (r_values.empty()) throw RangeError("sweep needs at least one r value");
  if (gammas.empty()) throw RangeError("sweep needs at least one gamma value");
  if (approaches.empty()) throw RangeError("sweep needs at least one approach");
  for (double r : r_values) PrepParams{r, desqueeze_scale}.validate();
  for (double g : gammas) LossModel{g, loss_kind}.validate();
  if (atoms < 4 || atoms > kMaxAtoms) {
    throw RangeError("atom number must lie in [4, " + std::to_string(kMaxAtoms) + "]");
  }
  integrator.validate();
  if (jobs < 1) throw RangeError("jobs must be at least 1");
}

std::vector<SweepRecord> fullham_sweep(const FullHamSpec& spec) {
  spec.validate();
  const std::size_t nr = spec.r_values.size();
  const std::size_t ng = spec.gammas.size();
  std::vector<SweepRecord> records(spec.approaches.size() * ng * nr);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  detail::parallel_for(nr, spec.jobs, [&](std::size_t ir) {
    const double r = spec.r_values[ir];
    std::optional<FullState> fs;
    std::string failure;
    try {
      fs = prepare_full(r, spec.atoms, spec.desqueeze_scale, spec.integrator);
    } catch (const IntegrationError& e) {
      failure = e.what();
    }
    std::optional<SettingTables> tables;
    if (fs) tables.emplace(reduced_setting_tables(*fs, spec.angles));

    for (std::size_t ia = 0; ia < spec.approaches.size(); ++ia)
      for (std::size_t ig = 0; ig < ng; ++ig) {
        SweepRecord& rec = records[(ia * ng + ig) * nr + ir];
        rec.approach = spec.approaches[ia];
        rec.r = r;
        rec.gamma = spec.gammas[ig];
        rec.k_cut = spec.atoms;
        rec.atoms = spec.atoms;
        if (!fs) {
          rec.boundary_mass = nan;
          rec.norm_drift = nan;
          rec.error = RecordError::IntegrationFailure;
          rec.message = failure;
          rec.E.fill(nan);
          rec.B = nan;
          continue;
        }
        rec.boundary_mass = reduced_boundary_mass(*fs);
        rec.norm_drift = fs->norm_drift;
        evaluate(*tables, LossModel{spec.gammas[ig], spec.loss_kind}, rec);
      }
  });
  return records;
}

}  // namespace splitbell
