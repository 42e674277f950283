#include "splitbell/evolution.hpp"

#include "splitbell/error.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace splitbell {

namespace {

// Dormand-Prince 5(4) tableau; the right-hand side is autonomous so the
// nodes c_i are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

using Vec = std::vector<Amplitude>;

double l2(const Vec& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

// out = y + h * sum_j w_j k_j
void combine(Vec& out, const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    Amplitude acc{0.0, 0.0};
    for (const auto& [w, k] : terms) acc += w * (*k)[i];
    out[i] = y[i] + h * acc;
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw RangeError("integrator tolerances must be strictly positive");
  }
  if (max_steps == 0) throw RangeError("integrator max_steps must be positive");
}

void PrepParams::validate() const {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw RangeError("squeezing parameter r must be finite and non-negative");
  }
  if (!(desqueeze_scale >= 0.0) || !std::isfinite(desqueeze_scale)) {
    throw RangeError("desqueeze_scale must be finite and non-negative");
  }
}

std::vector<Amplitude> evolve(std::span<const Amplitude> initial, const SparseGenerator& generator,
                              double parameter, const IntegratorConfig& cfg) {
  cfg.validate();
  if (generator.dim() != initial.size()) {
    throw RangeError("generator dimension " + std::to_string(generator.dim()) +
                     " does not match state length " + std::to_string(initial.size()));
  }
  Vec y(initial.begin(), initial.end());
  if (parameter == 0.0) return y;

  const std::size_t n = y.size();
  const Amplitude minus_i{0.0, -1.0};
  auto rhs = [&](const Vec& in, Vec& out) { generator.apply(in, out, minus_i); };

  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), next(n);
  rhs(y, k1);

  const double direction = parameter > 0.0 ? 1.0 : -1.0;
  double s = 0.0;
  double h = direction * std::min(std::abs(parameter), 0.01);
  std::size_t steps = 0;

  while (direction * (parameter - s) > 0.0) {
    if (steps++ >= cfg.max_steps) {
      throw IntegrationError("integrator exhausted " + std::to_string(cfg.max_steps) +
                                 " steps at s = " + std::to_string(s) + " of " +
                                 std::to_string(parameter),
                             s);
    }
    bool last = false;
    if (direction * (s + h - parameter) >= 0.0) {
      h = parameter - s;
      last = true;
    }

    combine(tmp, y, h, {{a21, &k1}});
    rhs(tmp, k2);
    combine(tmp, y, h, {{a31, &k1}, {a32, &k2}});
    rhs(tmp, k3);
    combine(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    rhs(tmp, k4);
    combine(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    rhs(tmp, k5);
    combine(tmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    rhs(tmp, k6);
    combine(next, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    rhs(next, k7);

    double err2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Amplitude e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err2 += std::norm(e);
    }
    const double scale = cfg.atol + cfg.rtol * std::max(l2(y), l2(next));
    const double ratio = std::sqrt(err2) / scale;

    if (ratio <= 1.0) {
      s = last ? parameter : s + h;
      y.swap(next);
      k1.swap(k7);
    }
    const double grow = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    if (ratio <= 1.0 && last) break;
    h *= ratio <= 1.0 ? grow : std::min(grow, 1.0);
  }
  return y;
}

StateVector evolve(const StateVector& state, const SparseGenerator& generator, double parameter,
                   const IntegratorConfig& cfg) {
  return StateVector(state.config(), evolve(state.amplitudes(), generator, parameter, cfg));
}

PreparedState prepare_bell_state(const PrepParams& params, const TruncationConfig& cfg,
                                 const IntegratorConfig& integrator, PrepBasis basis) {
  params.validate();
  integrator.validate();

  // labels[i] is the full-basis label of working-vector entry i
  std::optional<ImbalanceSubspace> sub;
  if (basis == PrepBasis::ImbalanceSubspace) sub.emplace(cfg, 0);
  const std::size_t n = sub ? sub->size() : cfg.dimension();
  std::vector<FockLabel> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = label_of(sub ? sub->full_index(i) : i, cfg);

  const int top = cfg.k_cut();
  auto edge_mass = [&](const Vec& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const FockLabel& l = labels[i];
      if (l.k_a == top || l.l_a == top || l.k_b == top || l.l_b == top) m += std::norm(v[i]);
    }
    return m;
  };

  Vec psi(n, Amplitude{0.0, 0.0});
  psi[0] = 1.0;  // the vacuum is the first label in both orderings
  double max_edge = 0.0;
  auto stage = [&](GeneratorKind kind, double parameter) {
    const auto gen = sub ? cached_generator(kind, *sub) : cached_generator(kind, cfg);
    psi = evolve(psi, *gen, parameter, integrator);
    max_edge = std::max(max_edge, edge_mass(psi));
  };

  stage(GeneratorKind::TmsGlobal, 2.0 * params.r);
  for (std::size_t i = 0; i < n; ++i)
    if ((labels[i].k_a + labels[i].k_b) % 2 != 0) psi[i] = -psi[i];
  stage(GeneratorKind::Split, std::numbers::pi / 4.0);
  stage(GeneratorKind::TmsLocalA, params.desqueeze_scale * params.r);
  stage(GeneratorKind::TmsLocalB, params.desqueeze_scale * params.r);

  PreparedState out{sub ? sub->embed(psi) : StateVector(cfg, std::move(psi))};
  out.max_stage_boundary_mass = max_edge;
  const double nrm = norm(out.state);
  out.norm_drift = std::abs(nrm - 1.0);
  out.state.scale(1.0 / nrm);
  out.boundary_mass = boundary_mass(out.state);
  return out;
}

StateVector tms_closed_form(double r, const TruncationConfig& cfg) {
  if (!(r >= 0.0)) throw RangeError("squeezing parameter r must be non-negative");
  StateVector s(cfg);
  const double sech = 1.0 / std::cosh(r);
  const double t = std::tanh(r);
  Amplitude phase{1.0, 0.0};
  double mag = sech;
  for (int k = 0; k <= cfg.k_cut(); ++k) {
    s.at(FockLabel{k, k, 0, 0}) = mag * phase;
    phase *= Amplitude{0.0, -1.0};
    mag *= t;
  }
  return s;
}

double rotation_element_binomial(double theta, int n, int k_out, int k_in) {
  if (n < 0 || k_out < 0 || k_in < 0 || k_out > n || k_in > n) {
    throw RangeError("rotation element outside sector");
  }
  const int l_in = n - k_in;
  const int l_out = n - k_out;
  const long double c = std::cos(static_cast<long double>(theta));
  const long double s = std::sin(static_cast<long double>(theta));

  auto binom = [](int top, int bottom) {
    long double v = 1.0L;
    for (int j = 1; j <= bottom; ++j) v = v * (top - bottom + j) / j;
    return v;
  };
  auto ipow = [](long double base, int e) {
    long double v = 1.0L;
    for (int j = 0; j < e; ++j) v *= base;
    return v;
  };

  // a1^dag -> c a1^dag - s a-1^dag, a-1^dag -> s a1^dag + c a-1^dag
  long double sum = 0.0L;
  for (int i = std::max(0, k_out - l_in); i <= std::min(k_in, k_out); ++i) {
    const int j = k_out - i;
    sum += binom(k_in, i) * binom(l_in, j) * ipow(c, i) * ipow(-s, k_in - i) * ipow(s, j) *
           ipow(c, l_in - j);
  }
  const long double log_norm = 0.5L * (std::lgamma(static_cast<long double>(k_out + 1)) +
                                       std::lgamma(static_cast<long double>(l_out + 1)) -
                                       std::lgamma(static_cast<long double>(k_in + 1)) -
                                       std::lgamma(static_cast<long double>(l_in + 1)));
  return static_cast<double>(sum * std::exp(log_norm));
}

WellRotation::WellRotation(double theta, const TruncationConfig& cfg)
    : theta_(theta), k_cut_(cfg.k_cut()), blocks_(static_cast<std::size_t>(2 * cfg.k_cut() + 1)) {
  for (int n = 0; n <= 2 * k_cut_; ++n) {
    const int f = first(n);
    const int m = size(n);
    auto& block = blocks_[static_cast<std::size_t>(n)];
    block.assign(static_cast<std::size_t>(m) * m, 0.0);
    if (n <= k_cut_) {
      for (int ko = 0; ko < m; ++ko)
        for (int ki = 0; ki < m; ++ki)
          block[static_cast<std::size_t>(ko) * m + ki] = rotation_element_binomial(theta, n, ko, ki);
      continue;
    }
    // clipped sector: exponentiate -i theta S^y restricted to k in [f, f+m)
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(m, m);
    for (int idx = 0; idx < m; ++idx) {
      const int k = f + idx;
      const int l = n - k;
      if (idx > 0) gen(idx - 1, idx) = -theta * std::sqrt(static_cast<double>(k) * (l + 1));
      if (idx + 1 < m) gen(idx + 1, idx) = theta * std::sqrt(static_cast<double>(k + 1) * l);
    }
    const Eigen::MatrixXd expm = gen.exp();
    for (int ko = 0; ko < m; ++ko)
      for (int ki = 0; ki < m; ++ki) block[static_cast<std::size_t>(ko) * m + ki] = expm(ko, ki);
  }
}

int WellRotation::first(int n) const noexcept { return std::max(0, n - k_cut_); }

int WellRotation::size(int n) const noexcept { return std::min(n, k_cut_) - first(n) + 1; }

double WellRotation::element(int n, int k_out, int k_in) const {
  if (n < 0 || n > 2 * k_cut_) throw RangeError("sector outside truncated space");
  const int f = first(n);
  const int m = size(n);
  if (k_out < f || k_out >= f + m || k_in < f || k_in >= f + m) return 0.0;
  return blocks_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k_out - f) * m + (k_in - f)];
}

std::span<const double> WellRotation::block(int n) const {
  if (n < 0 || n > 2 * k_cut_) throw RangeError("sector outside truncated space");
  return blocks_[static_cast<std::size_t>(n)];
}

void WellRotation::apply_block(int n, std::span<double> re, std::span<double> im) const {
  const int m = size(n);
  const auto& block = blocks_[static_cast<std::size_t>(n)];
  std::vector<double> out_re(static_cast<std::size_t>(m), 0.0);
  std::vector<double> out_im(static_cast<std::size_t>(m), 0.0);
  for (int ko = 0; ko < m; ++ko)
    for (int ki = 0; ki < m; ++ki) {
      const double w = block[static_cast<std::size_t>(ko) * m + ki];
      out_re[static_cast<std::size_t>(ko)] += w * re[static_cast<std::size_t>(ki)];
      out_im[static_cast<std::size_t>(ko)] += w * im[static_cast<std::size_t>(ki)];
    }
  std::copy(out_re.begin(), out_re.end(), re.begin());
  std::copy(out_im.begin(), out_im.end(), im.begin());
}

StateVector rotate(const StateVector& state, const WellRotation& rot_a, const WellRotation& rot_b) {
  const TruncationConfig& cfg = state.config();
  const int kc = cfg.k_cut();
  const std::size_t d = static_cast<std::size_t>(cfg.per_mode());
  const std::size_t d2 = d * d;
  const auto in = state.amplitudes();

  // Well A: rows of length d2 (the whole B part) move together.
  std::vector<Amplitude> mid(in.size(), Amplitude{0.0, 0.0});
  for (int n = 0; n <= 2 * kc; ++n) {
    const int f = rot_a.first(n);
    const int m = rot_a.size(n);
    const auto block = rot_a.block(n);
    for (int ko = f; ko < f + m; ++ko) {
      Amplitude* out_row = mid.data() + (static_cast<std::size_t>(ko) * d + (n - ko)) * d2;
      for (int ki = f; ki < f + m; ++ki) {
        const double w = block[static_cast<std::size_t>(ko - f) * m + (ki - f)];
        if (w == 0.0) continue;
        const Amplitude* in_row = in.data() + (static_cast<std::size_t>(ki) * d + (n - ki)) * d2;
        for (std::size_t b = 0; b < d2; ++b) out_row[b] += w * in_row[b];
      }
    }
  }

  // Well B: each A index owns a contiguous d2 block.
  StateVector out(cfg);
  auto dst = out.amplitudes();
  for (std::size_t a = 0; a < d2; ++a) {
    const Amplitude* src = mid.data() + a * d2;
    Amplitude* tgt = dst.data() + a * d2;
    for (int n = 0; n <= 2 * kc; ++n) {
      const int f = rot_b.first(n);
      const int m = rot_b.size(n);
      const auto block = rot_b.block(n);
      for (int ko = 0; ko < m; ++ko) {
        Amplitude acc{0.0, 0.0};
        for (int ki = 0; ki < m; ++ki)
          acc += block[static_cast<std::size_t>(ko) * m + ki] *
                 src[static_cast<std::size_t>(f + ki) * d + (n - f - ki)];
        tgt[static_cast<std::size_t>(f + ko) * d + (n - f - ko)] = acc;
      }
    }
  }
  return out;
}

StateVector rotate(const StateVector& state, double theta_a, double theta_b) {
  const WellRotation rot_a(theta_a, state.config());
  const WellRotation rot_b(theta_b, state.config());
  return rotate(state, rot_a, rot_b);
}

}  // namespace splitbell
