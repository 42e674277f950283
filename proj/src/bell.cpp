#include "splitbell/bell.hpp"

#include "parallel.hpp"
#include "splitbell/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace splitbell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void mark_failed(SweepRecord& rec, RecordError err, std::string message) {
  rec.error = err;
  rec.message = std::move(message);
  rec.E.fill(kNaN);
  rec.B = kNaN;
}

}  // namespace

BellAngles BellAngles::optimal() {
  constexpr double pi = std::numbers::pi;
  return {3.0 * pi / 8.0, pi / 8.0, pi / 4.0, 0.0};
}

std::array<std::pair<double, double>, 4> BellAngles::settings() const {
  return {{{theta_a, theta_b}, {theta_a_prime, theta_b}, {theta_a, theta_b_prime},
           {theta_a_prime, theta_b_prime}}};
}

std::string_view approach_name(Approach a) {
  switch (a) {
    case Approach::I: return "I";
    case Approach::II: return "II";
    case Approach::III: return "III";
  }
  return "?";
}

std::optional<Approach> parse_approach(std::string_view name) {
  if (name == "I" || name == "1") return Approach::I;
  if (name == "II" || name == "2") return Approach::II;
  if (name == "III" || name == "3") return Approach::III;
  return std::nullopt;
}

SettingTables setting_tables(const StateVector& state, const BellAngles& angles) {
  const TruncationConfig& cfg = state.config();
  const WellRotation ra(angles.theta_a, cfg);
  const WellRotation ra_p(angles.theta_a_prime, cfg);
  const WellRotation rb(angles.theta_b, cfg);
  const WellRotation rb_p(angles.theta_b_prime, cfg);
  return {probability_table(state, ra, rb), probability_table(state, ra_p, rb),
          probability_table(state, ra, rb_p), probability_table(state, ra_p, rb_p)};
}

double correlator(const ProbabilityTable& table, Approach approach, const LossModel& loss) {
  switch (approach) {
    case Approach::I: return correlator_I_loss(table, loss);
    case Approach::II: return correlator_II_loss(table, loss);
    case Approach::III: return correlator_III_loss(table, loss);
  }
  throw RangeError("unknown approach");
}

void evaluate(const SettingTables& tables, const LossModel& loss, SweepRecord& record) {
  try {
    for (std::size_t i = 0; i < 4; ++i) record.E[i] = correlator(tables[i], record.approach, loss);
    record.B = record.E[0] + record.E[1] + record.E[2] - record.E[3];
    record.error = RecordError::None;
    record.message.clear();
  } catch (const UndefinedCorrelator& e) {
    mark_failed(record, RecordError::UndefinedCorrelator, e.what());
  }
}

SweepRecord chsh_value(const PrepParams& prep, const BellAngles& angles, Approach approach,
                       const LossModel& loss, const TruncationConfig& cfg,
                       const IntegratorConfig& integrator) {
  loss.validate();
  SweepRecord rec;
  rec.approach = approach;
  rec.r = prep.r;
  rec.gamma = loss.survival;
  rec.k_cut = cfg.k_cut();
  const PreparedState ps = prepare_bell_state(prep, cfg, integrator);
  rec.boundary_mass = ps.boundary_mass;
  rec.norm_drift = ps.norm_drift;
  evaluate(setting_tables(ps.state, angles), loss, rec);
  return rec;
}

double exact_chsh(double r) {
  if (!(r >= 0.0)) throw RangeError("squeezing parameter r must be non-negative");
  const double c = std::cosh(r);
  return 4.0 * std::numbers::sqrt2 * c * c / (3.0 * std::cosh(2.0 * r) - 1.0);
}

double violation_threshold() {
  double lo = 0.0;  // exact_chsh(0) = 2 sqrt 2 > 2
  double hi = 2.0;  // exact_chsh(2) < 2
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (exact_chsh(mid) > 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double chsh_from_ch(const std::array<ChProbabilities, 4>& s) {
  // s[0] = (A,B), s[1] = (A',B), s[2] = (A,B'), s[3] = (A',B')
  auto combo = [&](double ChProbabilities::*p) {
    return s[0].*p + s[2].*p + s[1].*p - s[3].*p;
  };
  const double lhs = combo(&ChProbabilities::pp) + combo(&ChProbabilities::mm) -
                     combo(&ChProbabilities::pm) - combo(&ChProbabilities::mp);
  const double all = s[0].all_all;
  if (!(all > 0.0)) throw UndefinedCorrelator("CH assembly undefined: P^{forall forall} vanishes");
  return lhs / all;
}

void SweepSpec::validate() const {
  if (r_values.empty()) throw RangeError("sweep needs at least one r value");
  if (gammas.empty()) throw RangeError("sweep needs at least one gamma value");
  if (approaches.empty()) throw RangeError("sweep needs at least one approach");
  for (double r : r_values) PrepParams{r, desqueeze_scale}.validate();
  for (double g : gammas) LossModel{g, loss_kind}.validate();
  TruncationConfig{k_cut};
  integrator.validate();
  if (jobs < 1) throw RangeError("jobs must be at least 1");
}

std::vector<SweepRecord> sweep(const SweepSpec& spec) {
  spec.validate();
  const TruncationConfig cfg(spec.k_cut);
  const std::size_t nr = spec.r_values.size();
  const std::size_t ng = spec.gammas.size();
  std::vector<SweepRecord> records(spec.approaches.size() * ng * nr);

  detail::parallel_for(nr, spec.jobs, [&](std::size_t ir) {
    const double r = spec.r_values[ir];
    std::optional<PreparedState> ps;
    std::string failure;
    try {
      ps = prepare_bell_state({r, spec.desqueeze_scale}, cfg, spec.integrator);
    } catch (const IntegrationError& e) {
      failure = e.what();
    }
    std::optional<SettingTables> tables;
    if (ps) tables.emplace(setting_tables(ps->state, spec.angles));

    for (std::size_t ia = 0; ia < spec.approaches.size(); ++ia)
      for (std::size_t ig = 0; ig < ng; ++ig) {
        SweepRecord& rec = records[(ia * ng + ig) * nr + ir];
        rec.approach = spec.approaches[ia];
        rec.r = r;
        rec.gamma = spec.gammas[ig];
        rec.k_cut = spec.k_cut;
        if (!ps) {
          rec.boundary_mass = kNaN;
          rec.norm_drift = kNaN;
          mark_failed(rec, RecordError::IntegrationFailure, failure);
          continue;
        }
        rec.boundary_mass = ps->boundary_mass;
        rec.norm_drift = ps->norm_drift;
        evaluate(*tables, LossModel{spec.gammas[ig], spec.loss_kind}, rec);
      }
  });
  return records;
}

std::vector<double> make_grid(double r_min, double r_max, double r_step) {
  if (!std::isfinite(r_min) || !std::isfinite(r_max) || !std::isfinite(r_step)) {
    throw RangeError("grid bounds must be finite");
  }
  if (!(r_step > 0.0)) throw RangeError("grid step must be positive");
  if (r_min > r_max) throw RangeError("grid minimum exceeds maximum");
  const double span = (r_max - r_min) / r_step;
  if (span > 1e6) throw RangeError("grid has too many points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = std::round((r_min + static_cast<double>(i) * r_step) * 1e12) / 1e12;
  return grid;
}

}  // namespace splitbell
