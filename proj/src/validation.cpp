#include "splitbell/validation.hpp"

#include "splitbell/bell.hpp"
#include "splitbell/error.hpp"
#include "splitbell/exacthamiltonian.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>

namespace splitbell {

namespace {

// ---- pinned tolerances -----------------------------------------------------
constexpr double kExactAtZeroTol = 1e-12;
constexpr double kThresholdLow = 0.490, kThresholdHigh = 0.492;
constexpr double kClosedFormSeconds = 1.0;
constexpr double kBoundaryLimit = 1e-8;
constexpr double kApproachIRelTol = 0.005;
constexpr double kNearZeroR = 0.01, kNearZeroBand = 0.01;
constexpr double kSmallR = 0.02, kSmallRLimit = 2.80;
constexpr double kDominanceSlack = 1e-9;
constexpr double kTopTarget = 2.48, kTopBand = 0.08;
constexpr double kNoViolationSlack = 1e-6;
constexpr double kLossBand = 0.03;
constexpr double kOracleTol = 1e-10;
constexpr int kOracleTables = 100, kOracleKCut = 5;
constexpr double kSelectionTol = 1e-10;
constexpr double kFirstOrderFactor = 5.0;
constexpr double kDesqueezeBand = 0.10;
constexpr int kStructureKCut = 16;
constexpr double kExactModelBand = 0.05;
constexpr double kExactModelSlack = 1e-6;
constexpr double kPairSector = 0.0045, kPairSectorBand = 0.20;
constexpr double kExactModelSeconds = 600.0;
constexpr double kChIdentityTol = 1e-12;
constexpr int kAtoms = 10;
// ---------------------------------------------------------------------------

Measurement at_most(std::string q, double v, double limit) {
  return {std::move(q), v, "<=", limit, 0.0, v <= limit};
}

Measurement at_least(std::string q, double v, double limit) {
  return {std::move(q), v, ">=", limit, 0.0, v >= limit};
}

Measurement within(std::string q, double v, double lo, double hi) {
  return {std::move(q), v, "in", lo, hi, v >= lo && v <= hi};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_r(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

// NaN-propagating extrema, so a failed record can never look like a pass
double nan_max(double a, double b) { return std::isnan(a) || std::isnan(b) ? a + b : std::max(a, b); }
double nan_min(double a, double b) { return std::isnan(a) || std::isnan(b) ? a + b : std::min(a, b); }

bool in_range(double r, double lo, double hi) { return r >= lo - 1e-12 && r <= hi + 1e-12; }

// Shared full-range sweeps, computed on first use.
class Context {
public:
  explicit Context(const ValidationOptions& opt) : opt_(opt) {}

  // union of the default grid 0..0.8/0.02, the 0.05..0.6/0.05 grid and r = 0.01
  const std::vector<double>& grid() {
    if (grid_.empty()) {
      std::set<double> g;
      for (double r : make_grid(0.0, 0.8, 0.02)) g.insert(r);
      for (double r : make_grid(0.05, 0.6, 0.05)) g.insert(r);
      g.insert(kNearZeroR);
      grid_.assign(g.begin(), g.end());
    }
    return grid_;
  }

  double top_of_grid() { return grid().back(); }

  const SweepRecord& ideal(Approach a, double gamma, double r) {
    if (ideal_.empty()) {
      SweepSpec spec;
      spec.r_values = grid();
      spec.gammas = {1.0, 0.9, 0.7};
      spec.k_cut = opt_.k_cut;
      spec.jobs = opt_.jobs;
      for (auto& rec : sweep(spec)) ideal_.emplace(key(rec.approach, rec.gamma, rec.r), rec);
    }
    return ideal_.at(key(a, gamma, r));
  }

  // desqueeze_scale = 0.5 on grid points below 0.2
  const SweepRecord& half_desqueeze(Approach a, double r) {
    if (half_.empty()) {
      SweepSpec spec;
      for (double x : grid())
        if (x > 0.0 && x < 0.2) spec.r_values.push_back(x);
      spec.k_cut = opt_.k_cut;
      spec.desqueeze_scale = 0.5;
      spec.jobs = opt_.jobs;
      for (auto& rec : sweep(spec)) half_.emplace(key(rec.approach, rec.gamma, rec.r), rec);
    }
    return half_.at(key(a, 1.0, r));
  }

  int jobs() const { return opt_.jobs; }
  int k_cut() const { return opt_.k_cut; }

private:
  using Key = std::tuple<int, long long, long long>;
  static Key key(Approach a, double gamma, double r) {
    return {static_cast<int>(a), std::llround(gamma * 1e9), std::llround(r * 1e9)};
  }

  ValidationOptions opt_;
  std::vector<double> grid_;
  std::map<Key, SweepRecord> ideal_;
  std::map<Key, SweepRecord> half_;
};

std::vector<Measurement> check_closed_form(Context&) {
  std::vector<Measurement> m;
  const auto t0 = std::chrono::steady_clock::now();
  const double at_zero = exact_chsh(0.0);
  const double root = violation_threshold();
  const double elapsed = seconds_since(t0);
  m.push_back(at_most("|exact_chsh(0) - 2 sqrt 2|", std::abs(at_zero - 2.0 * std::numbers::sqrt2),
                      kExactAtZeroTol));
  m.push_back(within("violation_threshold", root, kThresholdLow, kThresholdHigh));
  m.push_back(at_most("seconds", elapsed, kClosedFormSeconds));
  return m;
}

std::vector<Measurement> check_approach_I(Context& ctx) {
  std::vector<Measurement> m;
  for (double r : make_grid(0.05, 0.6, 0.05)) {
    const SweepRecord& rec = ctx.ideal(Approach::I, 1.0, r);
    const double exact = exact_chsh(r);
    m.push_back(at_most("boundary_mass r=" + fmt_r(r), rec.boundary_mass, kBoundaryLimit));
    m.push_back(at_most("|B_I/exact - 1| r=" + fmt_r(r), std::abs(rec.B - exact) / exact,
                        kApproachIRelTol));
  }
  return m;
}

std::vector<Measurement> check_approach_II(Context& ctx) {
  std::vector<Measurement> m;
  m.push_back(within("B_II r=0.01", ctx.ideal(Approach::II, 1.0, kNearZeroR).B,
                     2.0 - kNearZeroBand, 2.0 + kNearZeroBand));
  double min_step = std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (double r : ctx.grid()) {
    if (!in_range(r, 0.05, 0.4)) continue;
    const double b = ctx.ideal(Approach::II, 1.0, r).B;
    if (!std::isnan(prev)) min_step = nan_min(min_step, b - prev);
    prev = b;
  }
  m.push_back({"min successive increase of B_II on [0.05, 0.4]", min_step, "increasing", 0.0, 0.0,
               min_step > 0.0});
  double lowest = std::numeric_limits<double>::infinity();
  for (double r : ctx.grid())
    if (r > 0.0) lowest = nan_min(lowest, ctx.ideal(Approach::II, 1.0, r).B);
  m.push_back({"min B_II over grid r > 0", lowest, ">", 2.0, 0.0, lowest > 2.0});
  return m;
}

std::vector<Measurement> check_approach_III(Context& ctx) {
  std::vector<Measurement> m;
  m.push_back(at_least("B_III r=0.02", ctx.ideal(Approach::III, 1.0, kSmallR).B, kSmallRLimit));
  double worst = std::numeric_limits<double>::infinity();
  for (double r : ctx.grid()) {
    if (!(r > 0.0) || r > 0.6 + 1e-12) continue;
    worst = nan_min(worst, ctx.ideal(Approach::III, 1.0, r).B - ctx.ideal(Approach::I, 1.0, r).B);
  }
  m.push_back(at_least("min (B_III - B_I) on (0, 0.6]", worst, -kDominanceSlack));
  const double top = ctx.top_of_grid();
  m.push_back(within("B_III r=" + fmt_r(top), ctx.ideal(Approach::III, 1.0, top).B,
                     kTopTarget - kTopBand, kTopTarget + kTopBand));
  return m;
}

std::vector<Measurement> check_loss(Context& ctx) {
  std::vector<Measurement> m;
  bool identical = true;
  double worst_ii = -std::numeric_limits<double>::infinity();
  double worst_iii = 0.0;
  for (double r : ctx.grid()) {
    worst_ii = nan_max(worst_ii, ctx.ideal(Approach::II, 0.7, r).B);
    if (!(r > 0.0)) continue;
    const SweepRecord& ideal_i = ctx.ideal(Approach::I, 1.0, r);
    for (double g : {0.9, 0.7}) {
      const SweepRecord& lossy = ctx.ideal(Approach::I, g, r);
      for (int k = 0; k < 4; ++k)
        identical &= std::bit_cast<std::uint64_t>(lossy.E[k]) == std::bit_cast<std::uint64_t>(ideal_i.E[k]);
      identical &= std::bit_cast<std::uint64_t>(lossy.B) == std::bit_cast<std::uint64_t>(ideal_i.B);
    }
    if (r <= 0.4 + 1e-12) {
      const double ideal_iii = ctx.ideal(Approach::III, 1.0, r).B;
      worst_iii = nan_max(worst_iii, std::abs(ctx.ideal(Approach::III, 0.9, r).B - ideal_iii) / ideal_iii);
    }
  }
  m.push_back({"B_I bit-identical for gamma in {1, 0.9, 0.7}", identical ? 1.0 : 0.0, "bits==", 1.0,
               0.0, identical});
  m.push_back(at_most("max B_II at gamma=0.7", worst_ii, 2.0 + kNoViolationSlack));
  m.push_back(at_most("max |B_III(0.9)/B_III(1) - 1| on r <= 0.4", worst_iii, kLossBand));
  return m;
}

std::vector<Measurement> check_oracles(Context&) {
  std::vector<Measurement> m;
  const TruncationConfig cfg(kOracleKCut);
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  bool identical = true;
  for (int t = 0; t < kOracleTables; ++t) {
    std::vector<double> p(cfg.dimension());
    double sum = 0.0;
    for (auto& x : p) sum += (x = -std::log(1.0 - unit(rng)));  // flat Dirichlet
    for (auto& x : p) x /= sum;
    const ProbabilityTable table(cfg, std::move(p));
    const double gamma = unit(rng);
    const LossModel loss = LossModel::loss(gamma);
    worst = nan_max(worst, std::abs(correlator_II_loss(table, loss) -
                                     correlator_II(lossy_probability_table(table, loss))));
    auto same = [](double a, double b) {
      return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
    };
    identical &= same(correlator_I_detector(table, gamma), correlator_I_loss(table, loss));
    identical &= same(correlator_II_detector(table, gamma), correlator_II_loss(table, loss));
    identical &= same(correlator_III_detector(table, gamma), correlator_III_loss(table, loss));
  }
  m.push_back(at_most("max |E_II loss - E_II(lossy table)| over 100 tables", worst, kOracleTol));
  m.push_back({"detector variants bit-identical at eta=gamma", identical ? 1.0 : 0.0, "bits==", 1.0,
               0.0, identical});
  return m;
}

std::vector<Measurement> check_structure(Context& ctx) {
  std::vector<Measurement> m;
  const TruncationConfig cfg(kStructureKCut);
  for (double r : {0.1, 0.3, 0.5}) {
    // full-space propagation so that off-subspace amplitudes are actually computed
    const PreparedState ps = prepare_bell_state({r, 1.0}, cfg, {}, PrepBasis::Full);
    double off = 0.0;
    for (std::size_t i = 0; i < ps.state.size(); ++i) {
      const FockLabel l = label_of(i, cfg);
      if (l.k_a + l.k_b != l.l_a + l.l_b) off = nan_max(off, std::abs(ps.state[i]));
    }
    double odd = 0.0;
    for (const auto& [key, p] : sector_marginal(ps.state))
      if (std::abs(key.n_a - key.n_b) % 2 == 1) odd += p;
    m.push_back(at_most("max |amp| off k_A+k_B=l_A+l_B r=" + fmt_r(r), off, kSelectionTol));
    m.push_back(at_most("odd |N_A-N_B| mass r=" + fmt_r(r), odd, kSelectionTol));
  }
  const TruncationConfig small(12);
  for (double r : {0.01, 0.02, 0.05}) {
    const PreparedState ps = prepare_bell_state({r, 1.0}, small);
    const Amplitude amp = ps.state.at({1, 0, 0, 1});
    const double rel = std::abs(amp - Amplitude{0.0, r}) / r;
    m.push_back(at_most("|amp(1,0,0,1) - i r|/r r=" + fmt_r(r), rel, kFirstOrderFactor * r * r));
  }
  for (Approach a : {Approach::I, Approach::II, Approach::III}) {
    double max_full = -std::numeric_limits<double>::infinity();
    double max_half = -std::numeric_limits<double>::infinity();
    double worst_point = 0.0;
    for (double r : ctx.grid()) {
      if (!(r > 0.0) || !(r < 0.2)) continue;
      const double full = ctx.ideal(a, 1.0, r).B;
      const double half = ctx.half_desqueeze(a, r).B;
      max_full = nan_max(max_full, full);
      max_half = nan_max(max_half, half);
      worst_point = nan_max(worst_point, (full - half) / full);
    }
    const std::string name(approach_name(a));
    m.push_back(at_most("max-grid B_" + name + " reduction at desqueeze 0.5, r<0.2",
                        (max_full - max_half) / max_full, kDesqueezeBand));
    m.push_back(at_most("worst pointwise B_" + name + " reduction at desqueeze 0.5, r<0.2",
                        worst_point, kDesqueezeBand));
  }
  return m;
}

std::vector<Measurement> check_exact_model(Context& ctx) {
  std::vector<Measurement> m;
  const auto t0 = std::chrono::steady_clock::now();
  FullHamSpec spec;
  spec.r_values = make_grid(0.05, 0.3, 0.05);
  spec.atoms = kAtoms;
  spec.approaches = {Approach::II, Approach::III};
  spec.jobs = ctx.jobs();
  const auto records = fullham_sweep(spec);
  const FullState low = prepare_full(0.05, kAtoms);
  const double pair = reduced_sector_marginal(low)[SectorKey{1, 1}];
  const double elapsed = seconds_since(t0);

  double worst_iii = 0.0;
  double worst_ii = -std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    const double approx = ctx.ideal(rec.approach, 1.0, rec.r).B;
    if (rec.approach == Approach::III) worst_iii = nan_max(worst_iii, std::abs(rec.B - approx) / approx);
    if (rec.approach == Approach::II) worst_ii = nan_max(worst_ii, rec.B - approx);
  }
  m.push_back(at_most("max |B_III exact/approx - 1| r<=0.3", worst_iii, kExactModelBand));
  m.push_back(at_most("max (B_II exact - approx) r<=0.3", worst_ii, kExactModelSlack));
  m.push_back(within("P(N_A=1, N_B=1) r=0.05", pair, kPairSector * (1.0 - kPairSectorBand),
                     kPairSector * (1.0 + kPairSectorBand)));
  m.push_back(at_most("seconds", elapsed, kExactModelSeconds));
  return m;
}

std::vector<Measurement> check_ch_identity(Context&) {
  std::vector<Measurement> m;
  const TruncationConfig cfg(20);
  for (double r : {0.1, 0.3}) {
    const PreparedState ps = prepare_bell_state({r, 1.0}, cfg);
    const SettingTables tables = setting_tables(ps.state, BellAngles::optimal());
    SweepRecord rec;
    rec.approach = Approach::III;
    evaluate(tables, LossModel::ideal(), rec);
    std::array<ChProbabilities, 4> ch;
    for (int i = 0; i < 4; ++i) ch[i] = ch_probabilities(tables[i]);
    m.push_back(at_most("|B_III - CH assembly| r=" + fmt_r(r), std::abs(rec.B - chsh_from_ch(ch)),
                        kChIdentityTol));
  }
  return m;
}

struct Criterion {
  int id;
  const char* name;
  std::vector<Measurement> (*run)(Context&);
};

const Criterion kCriteria[kCriterionCount] = {
    {1, "closed-form benchmark", check_closed_form},
    {2, "approach I against the closed form", check_approach_I},
    {3, "approach II ideal curve", check_approach_II},
    {4, "approach III ideal curve", check_approach_III},
    {5, "loss behavior", check_loss},
    {6, "oracle equivalences", check_oracles},
    {7, "state structure", check_structure},
    {8, "exact-Hamiltonian agreement", check_exact_model},
    {9, "CH assembly identity", check_ch_identity},
};

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string ValidationReport::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json j;
  j["passed"] = passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc{{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"seconds", c.seconds}};
    if (!c.error.empty()) jc["error"] = c.error;
    jc["measurements"] = nlohmann::json::array();
    for (const auto& mm : c.measurements) {
      nlohmann::json jm{{"quantity", mm.quantity}, {"measured", num(mm.measured)},
                        {"relation", mm.relation}, {"limit", num(mm.limit)}, {"passed", mm.passed}};
      if (mm.relation == "in") jm["upper"] = num(mm.upper);
      jc["measurements"].push_back(std::move(jm));
    }
    j["checks"].push_back(std::move(jc));
  }
  return j.dump(2);
}

ValidationReport run_validation(const ValidationOptions& options) {
  for (int id : options.only)
    if (id < 1 || id > kCriterionCount) throw RangeError("unknown criterion " + std::to_string(id));
  if (options.jobs < 1) throw RangeError("jobs must be at least 1");
  TruncationConfig{options.k_cut};

  Context ctx(options);
  ValidationReport report;
  for (const auto& c : kCriteria) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), c.id) == options.only.end())
      continue;
    CheckResult res;
    res.id = c.id;
    res.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      res.measurements = c.run(ctx);
      res.passed = !res.measurements.empty() &&
                   std::all_of(res.measurements.begin(), res.measurements.end(),
                               [](const Measurement& mm) { return mm.passed; });
    } catch (const std::exception& e) {
      res.error = e.what();
      res.passed = false;
    }
    res.seconds = seconds_since(t0);
    report.checks.push_back(std::move(res));
  }
  return report;
}

}  // namespace splitbell
