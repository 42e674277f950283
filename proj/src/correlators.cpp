#include "splitbell/correlators.hpp"

#include "splitbell/error.hpp"

#include <cmath>
#include <string>

namespace splitbell {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Probability that exactly `survivors` of `k` atoms survive. Log-domain so
// that k up to a few hundred stays finite; 0^0 = 1 at the endpoints.
double survival_pmf(int k, int survivors, double gamma) {
  if (survivors < 0 || survivors > k) return 0.0;
  const int lost = k - survivors;
  if (gamma == 1.0) return lost == 0 ? 1.0 : 0.0;
  if (gamma == 0.0) return survivors == 0 ? 1.0 : 0.0;
  return std::exp(log_binomial(k, survivors) + survivors * std::log(gamma) +
                  lost * std::log1p(-gamma));
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw RangeError("survival probability must lie in [0, 1], got " + std::to_string(gamma));
  }
}

// G and H tables over (k, l) in [0, k_cut]^2.
struct LossWeights {
  int d;
  std::vector<double> g;
  std::vector<double> h;

  LossWeights(int k_cut, double gamma) : d(k_cut + 1) {
    g.resize(static_cast<std::size_t>(d) * d);
    h.resize(static_cast<std::size_t>(d) * d);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        g[static_cast<std::size_t>(k) * d + l] = G_factor(k, l, gamma);
        h[static_cast<std::size_t>(k) * d + l] = H_factor(k, l, gamma);
      }
  }

  double G(int k, int l) const { return g[static_cast<std::size_t>(k) * d + l]; }
  double H(int k, int l) const { return h[static_cast<std::size_t>(k) * d + l]; }
};

// Extended precision for table sums: a k_cut = 20 table has ~2e5 entries and
// plain double accumulation drifts by ~1e-13.
using Accumulator = long double;

// Calls fn(p, k_A, l_A, k_B, l_B) over the table in storage order.
template <class Fn>
void for_each_entry(const ProbabilityTable& table, Fn&& fn) {
  const int d = table.config().per_mode();
  const auto& p = table.probs();
  std::size_t i = 0;
  for (int ka = 0; ka < d; ++ka)
    for (int la = 0; la < d; ++la)
      for (int kb = 0; kb < d; ++kb)
        for (int lb = 0; lb < d; ++lb, ++i) fn(p[i], ka, la, kb, lb);
}

}  // namespace

ProbabilityTable::ProbabilityTable(const TruncationConfig& cfg, std::vector<double> probs,
                                   double theta_a, double theta_b)
    : cfg_(cfg), probs_(std::move(probs)), theta_a_(theta_a), theta_b_(theta_b) {
  if (probs_.size() != cfg_.dimension()) {
    throw RangeError("probability table of length " + std::to_string(probs_.size()) +
                     " does not match basis dimension " + std::to_string(cfg_.dimension()));
  }
  for (double p : probs_) {
    if (!(p >= 0.0)) throw RangeError("probability table has a negative or NaN entry");
  }
  const double sum = total();
  if (std::abs(sum - 1.0) > kNormTolerance) {
    throw RangeError("probability table sums to " + std::to_string(sum) + ", not 1");
  }
}

ProbabilityTable ProbabilityTable::point(const TruncationConfig& cfg, const FockLabel& label) {
  std::vector<double> p(cfg.dimension(), 0.0);
  p[index_of(label, cfg)] = 1.0;
  return ProbabilityTable(cfg, std::move(p));
}

double ProbabilityTable::total() const {
  Accumulator s = 0.0;
  for (double p : probs_) s += p;
  return static_cast<double>(s);
}

ProbabilityTable probability_table(const StateVector& state, const WellRotation& rot_a,
                                   const WellRotation& rot_b) {
  const StateVector rotated = rotate(state, rot_a, rot_b);
  std::vector<double> p(rotated.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(rotated[i]);
  return ProbabilityTable(state.config(), std::move(p), rot_a.theta(), rot_b.theta());
}

ProbabilityTable probability_table(const StateVector& state, double theta_a, double theta_b) {
  return probability_table(state, WellRotation(theta_a, state.config()),
                           WellRotation(theta_b, state.config()));
}

double correlator_I(const ProbabilityTable& table) {
  Accumulator num = 0.0;
  Accumulator den = 0.0;
  for_each_entry(table, [&](double p, int ka, int la, int kb, int lb) {
    num += p * (ka - la) * (kb - lb);
    den += p * (ka + la) * (kb + lb);
  });
  if (!(den > 0.0)) {
    throw UndefinedCorrelator("normalized correlator undefined: <N_A N_B> vanishes");
  }
  return static_cast<double>(num / den);
}

double correlator_II(const ProbabilityTable& table) {
  Accumulator sum = 0.0;
  for_each_entry(table, [&](double p, int ka, int la, int kb, int lb) {
    sum += p * (sign_binned(ka - la) * sign_binned(kb - lb));
  });
  return static_cast<double>(sum);
}

double correlator_III(const ProbabilityTable& table) {
  Accumulator num = 0.0;
  Accumulator coincidences = 0.0;
  for_each_entry(table, [&](double p, int ka, int la, int kb, int lb) {
    if (ka + la == 0 || kb + lb == 0) return;
    num += p * (sign_binned(ka - la) * sign_binned(kb - lb));
    coincidences += p;
  });
  if (!(coincidences > 0.0)) {
    throw UndefinedCorrelator("coincidence correlator undefined: <Pi> vanishes");
  }
  return static_cast<double>(num / coincidences);
}

ChProbabilities ch_probabilities(const ProbabilityTable& table) {
  Accumulator pp = 0.0, pm = 0.0, mp = 0.0, mm = 0.0;
  for_each_entry(table, [&](double p, int ka, int la, int kb, int lb) {
    if (ka + la == 0 || kb + lb == 0) return;
    const bool a_plus = ka >= la;
    const bool b_plus = kb >= lb;
    if (a_plus && b_plus) pp += p;
    else if (a_plus) pm += p;
    else if (b_plus) mp += p;
    else mm += p;
  });
  ChProbabilities ch;
  ch.pp = static_cast<double>(pp);
  ch.pm = static_cast<double>(pm);
  ch.mp = static_cast<double>(mp);
  ch.mm = static_cast<double>(mm);
  ch.all_all = ch.pp + ch.pm + ch.mp + ch.mm;
  ch.plus_all = ch.pp + ch.pm;
  ch.minus_all = ch.mp + ch.mm;
  ch.all_plus = ch.pp + ch.mp;
  ch.all_minus = ch.pm + ch.mm;
  return ch;
}

void LossModel::validate() const { check_gamma(survival); }

double kraus_amplitude(int k, int n, double gamma) {
  check_gamma(gamma);
  if (k < 0 || n < 0) throw RangeError("Kraus indices must be non-negative");
  if (n > k) return 0.0;
  return std::sqrt(survival_pmf(k, k - n, gamma));
}

double G_factor(int k, int l, double gamma) {
  check_gamma(gamma);
  if (k < 0 || l < 0) throw RangeError("occupations must be non-negative");
  // 1 - 2 P(readout_k < readout_l); survivors of the two modes are independent
  double below = 0.0;
  double cumulative = 0.0;
  for (int m = 0; m <= l; ++m) {
    if (m - 1 >= 0 && m - 1 <= k) cumulative += survival_pmf(k, m - 1, gamma);
    below += survival_pmf(l, m, gamma) * cumulative;
  }
  return 1.0 - 2.0 * below;
}

double H_factor(int k, int l, double gamma) {
  check_gamma(gamma);
  if (k < 0 || l < 0) throw RangeError("occupations must be non-negative");
  if (k + l == 0) return 1.0;
  if (gamma == 1.0) return 0.0;
  return std::pow(1.0 - gamma, k + l);
}

double correlator_I_loss(const ProbabilityTable& table, const LossModel& loss) {
  loss.validate();
  return correlator_I(table);
}

double correlator_II_loss(const ProbabilityTable& table, const LossModel& loss) {
  loss.validate();
  const LossWeights w(table.config().k_cut(), loss.survival);
  Accumulator sum = 0.0;
  for_each_entry(table, [&](double p, int ka, int la, int kb, int lb) {
    sum += p * (w.G(ka, la) * w.G(kb, lb));
  });
  return static_cast<double>(sum);
}

double correlator_III_loss(const ProbabilityTable& table, const LossModel& loss) {
  loss.validate();
  const LossWeights w(table.config().k_cut(), loss.survival);
  // (G_A - H_A)(G_B - H_B) expands to the four trace terms; (1 - H_A)(1 - H_B)
  // to Tr(Pi rho). Entries with a zero weight are skipped so that the lossless
  // limit reproduces correlator_III bit for bit.
  Accumulator num = 0.0;
  Accumulator den = 0.0;
  for_each_entry(table, [&](double p, int ka, int la, int kb, int lb) {
    const double wa = 1.0 - w.H(ka, la);
    const double wb = 1.0 - w.H(kb, lb);
    if (wa == 0.0 || wb == 0.0) return;
    num += p * ((w.G(ka, la) - w.H(ka, la)) * (w.G(kb, lb) - w.H(kb, lb)));
    den += p * (wa * wb);
  });
  if (!(den > 0.0)) {
    throw UndefinedCorrelator("coincidence correlator undefined: Tr(Pi rho) vanishes");
  }
  return static_cast<double>(num / den);
}

ProbabilityTable lossy_probability_table(const ProbabilityTable& table, const LossModel& loss) {
  loss.validate();
  const TruncationConfig& cfg = table.config();
  const int d = cfg.per_mode();
  const double gamma = loss.survival;

  std::vector<double> pmf(static_cast<std::size_t>(d) * d, 0.0);  // [k][survivors]
  for (int k = 0; k < d; ++k)
    for (int j = 0; j <= k; ++j) pmf[static_cast<std::size_t>(k) * d + j] = survival_pmf(k, j, gamma);

  std::vector<double> cur = table.probs();
  std::vector<double> next(cur.size());
  // stride of each mode in the (k_A, l_A, k_B, l_B) ordering
  const std::size_t dd = static_cast<std::size_t>(d);
  const std::size_t strides[4] = {dd * dd * dd, dd * dd, dd, 1};
  for (std::size_t stride : strides) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (cur[i] == 0.0) continue;
      const int k = static_cast<int>((i / stride) % dd);
      const std::size_t base = i - static_cast<std::size_t>(k) * stride;
      for (int j = 0; j <= k; ++j)
        next[base + static_cast<std::size_t>(j) * stride] +=
            cur[i] * pmf[static_cast<std::size_t>(k) * d + j];
    }
    cur.swap(next);
  }
  return ProbabilityTable(cfg, std::move(cur), table.theta_a(), table.theta_b());
}

double correlator_I_detector(const ProbabilityTable& table, double eta) {
  return correlator_I_loss(table, LossModel::detector(eta));
}

double correlator_II_detector(const ProbabilityTable& table, double eta) {
  return correlator_II_loss(table, LossModel::detector(eta));
}

double correlator_III_detector(const ProbabilityTable& table, double eta) {
  return correlator_III_loss(table, LossModel::detector(eta));
}

}  // namespace splitbell
