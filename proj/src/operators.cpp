#include "splitbell/operators.hpp"

#include "ladder.hpp"
#include "splitbell/error.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace splitbell {

namespace {

constexpr int kModeA1 = 0;
constexpr int kModeAm1 = 1;
constexpr int kModeB1 = 2;
constexpr int kModeBm1 = 3;

class FourModeBasis {
public:
  explicit FourModeBasis(const TruncationConfig& cfg) : cfg_(cfg) {}

  std::size_t size() const { return cfg_.dimension(); }

  std::array<int, 4> occupations(std::size_t i) const {
    const FockLabel l = label_of(i, cfg_);
    return {l.k_a, l.l_a, l.k_b, l.l_b};
  }

  std::optional<std::size_t> find(const std::array<int, 4>& occ) const {
    for (int n : occ)
      if (n < 0 || n > cfg_.k_cut()) return std::nullopt;
    return index_of(FockLabel{occ[0], occ[1], occ[2], occ[3]}, cfg_);
  }

private:
  TruncationConfig cfg_;
};

using Term = detail::LadderTerm<4>;

Term pair_creation(int m1, int m2) {
  Term t{{1.0, 0.0}};
  t.create[m1] = 1;
  t.create[m2] = 1;
  return t;
}

Term pair_annihilation(int m1, int m2) {
  Term t{{1.0, 0.0}};
  t.annihilate[m1] = 1;
  t.annihilate[m2] = 1;
  return t;
}

// coef * a_to^dag a_from
Term hop(Amplitude coef, int to, int from) {
  Term t{coef};
  t.create[to] = 1;
  t.annihilate[from] = 1;
  return t;
}

std::vector<Term> squeezing_terms(int m1, int m2) {
  return {pair_creation(m1, m2), pair_annihilation(m1, m2)};
}

std::vector<Term> split_terms() {
  const Amplitude i{0.0, 1.0};
  return {hop(-i, kModeA1, kModeB1), hop(i, kModeB1, kModeA1), hop(-i, kModeAm1, kModeBm1),
          hop(i, kModeBm1, kModeAm1)};
}

std::vector<Term> rotation_terms(Well well) {
  const Amplitude i{0.0, 1.0};
  const int plus = well == Well::A ? kModeA1 : kModeB1;
  const int minus = well == Well::A ? kModeAm1 : kModeBm1;
  return {hop(-i, minus, plus), hop(i, plus, minus)};
}

std::vector<Term> terms_of(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::TmsGlobal:
    case GeneratorKind::TmsLocalA: return squeezing_terms(kModeA1, kModeAm1);
    case GeneratorKind::TmsLocalB: return squeezing_terms(kModeB1, kModeBm1);
    case GeneratorKind::Split: return split_terms();
    case GeneratorKind::RotationA: return rotation_terms(Well::A);
    case GeneratorKind::RotationB: return rotation_terms(Well::B);
  }
  throw RangeError("unknown generator kind");
}

class SubspaceBasis {
public:
  explicit SubspaceBasis(const ImbalanceSubspace& sub) : sub_(sub), full_(sub.config()) {}

  std::size_t size() const { return sub_.size(); }

  std::array<int, 4> occupations(std::size_t i) const {
    return full_.occupations(sub_.full_index(i));
  }

  std::optional<std::size_t> find(const std::array<int, 4>& occ) const {
    const auto f = full_.find(occ);
    if (!f) return std::nullopt;
    return sub_.local_index(*f);
  }

private:
  const ImbalanceSubspace& sub_;
  FourModeBasis full_;
};

}  // namespace

SparseGenerator SparseGenerator::from_entries(std::size_t dim, std::vector<Entry> entries) {
  for (const auto& e : entries) {
    if (e.row >= dim || e.col >= dim) {
      throw RangeError("sparse entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                       ") outside dimension " + std::to_string(dim));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  SparseGenerator g;
  g.dim_ = dim;
  g.row_ptr_.assign(dim + 1, 0);
  g.cols_.reserve(entries.size());
  g.values_.reserve(entries.size());
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    Amplitude sum{0.0, 0.0};
    while (j < entries.size() && entries[j].row == entries[i].row &&
           entries[j].col == entries[i].col) {
      sum += entries[j].value;
      ++j;
    }
    if (sum != Amplitude{0.0, 0.0}) {
      g.cols_.push_back(static_cast<std::uint32_t>(entries[i].col));
      g.values_.push_back(sum);
      ++g.row_ptr_[entries[i].row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < dim; ++r) g.row_ptr_[r + 1] += g.row_ptr_[r];
  return g;
}

SparseGenerator SparseGenerator::diagonal(std::span<const double> values) {
  std::vector<Entry> entries;
  entries.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) entries.push_back({i, i, {values[i], 0.0}});
  return from_entries(values.size(), std::move(entries));
}

std::vector<SparseGenerator::Entry> SparseGenerator::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      out.push_back({r, cols_[k], values_[k]});
  return out;
}

Amplitude SparseGenerator::element(std::size_t row, std::size_t col) const {
  if (row >= dim_ || col >= dim_) return {0.0, 0.0};
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
  if (it == last || *it != col) return {0.0, 0.0};
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseGenerator::apply(std::span<const Amplitude> in, std::span<Amplitude> out,
                            Amplitude factor) const {
  if (in.size() != dim_ || out.size() != dim_) {
    throw RangeError("generator of dimension " + std::to_string(dim_) +
                     " applied to vector of length " + std::to_string(in.size()));
  }
  const double fr = factor.real();
  const double fi = factor.imag();
  for (std::size_t r = 0; r < dim_; ++r) {
    double sr = 0.0;
    double si = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Amplitude v = values_[k];
      const Amplitude x = in[cols_[k]];
      sr += v.real() * x.real() - v.imag() * x.imag();
      si += v.real() * x.imag() + v.imag() * x.real();
    }
    out[r] = Amplitude{fr * sr - fi * si, fr * si + fi * sr};
  }
}

bool SparseGenerator::is_hermitian(double tol) const {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const Amplitude mirror = element(cols_[k], r);
      if (std::abs(mirror - std::conj(values_[k])) > tol) return false;
      if (tol == 0.0 && mirror == Amplitude{0.0, 0.0}) return false;
    }
  return true;
}

SparseGenerator SparseGenerator::operator*(const SparseGenerator& rhs) const {
  if (dim_ != rhs.dim_) throw RangeError("dimension mismatch in sparse product");
  std::vector<Entry> out;
  for (std::size_t r = 0; r < dim_; ++r) {
    std::map<std::size_t, Amplitude> acc;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t mid = cols_[k];
      for (std::size_t q = rhs.row_ptr_[mid]; q < rhs.row_ptr_[mid + 1]; ++q)
        acc[rhs.cols_[q]] += values_[k] * rhs.values_[q];
    }
    for (const auto& [c, v] : acc) out.push_back({r, c, v});
  }
  return from_entries(dim_, std::move(out));
}

SparseGenerator SparseGenerator::operator-(const SparseGenerator& rhs) const {
  if (dim_ != rhs.dim_) throw RangeError("dimension mismatch in sparse difference");
  std::vector<Entry> out = entries();
  for (auto e : rhs.entries()) {
    e.value = -e.value;
    out.push_back(e);
  }
  return from_entries(dim_, std::move(out));
}

double SparseGenerator::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

double commutator_norm(const SparseGenerator& a, const SparseGenerator& b) {
  return (a * b - b * a).frobenius_norm();
}

SparseGenerator gen_tms_global(const TruncationConfig& cfg) {
  return detail::assemble<4>(FourModeBasis(cfg), terms_of(GeneratorKind::TmsGlobal));
}

SparseGenerator gen_tms_local(const TruncationConfig& cfg, Well well) {
  return detail::assemble<4>(
      FourModeBasis(cfg), terms_of(well == Well::A ? GeneratorKind::TmsLocalA : GeneratorKind::TmsLocalB));
}

SparseGenerator gen_split(const TruncationConfig& cfg) {
  return detail::assemble<4>(FourModeBasis(cfg), split_terms());
}

SparseGenerator gen_rotation_y(const TruncationConfig& cfg, Well well) {
  return detail::assemble<4>(FourModeBasis(cfg), rotation_terms(well));
}

ImbalanceSubspace::ImbalanceSubspace(const TruncationConfig& cfg, int imbalance)
    : cfg_(cfg), imbalance_(imbalance), local_(cfg.dimension(), -1) {
  const int d = cfg.per_mode();
  std::size_t i = 0;
  for (int ka = 0; ka < d; ++ka)
    for (int la = 0; la < d; ++la)
      for (int kb = 0; kb < d; ++kb)
        for (int lb = 0; lb < d; ++lb, ++i)
          if ((ka + kb) - (la + lb) == imbalance) {
            local_[i] = static_cast<std::int32_t>(full_.size());
            full_.push_back(i);
          }
}

std::optional<std::size_t> ImbalanceSubspace::local_index(std::size_t full) const {
  if (full >= local_.size() || local_[full] < 0) return std::nullopt;
  return static_cast<std::size_t>(local_[full]);
}

std::vector<Amplitude> ImbalanceSubspace::restrict(std::span<const Amplitude> full) const {
  if (full.size() != cfg_.dimension()) throw RangeError("state length does not match subspace basis");
  std::vector<Amplitude> out(full_.size());
  for (std::size_t i = 0; i < full_.size(); ++i) out[i] = full[full_[i]];
  return out;
}

StateVector ImbalanceSubspace::embed(std::span<const Amplitude> sub) const {
  if (sub.size() != full_.size()) throw RangeError("vector length does not match subspace size");
  StateVector s(cfg_);
  auto amps = s.amplitudes();
  for (std::size_t i = 0; i < full_.size(); ++i) amps[full_[i]] = sub[i];
  return s;
}

SparseGenerator restricted_generator(GeneratorKind kind, const ImbalanceSubspace& sub) {
  return detail::assemble<4>(SubspaceBasis(sub), terms_of(kind));
}

StateVector apply_pi_gate(StateVector state) {
  const int d = state.config().per_mode();
  auto amps = state.amplitudes();
  std::size_t i = 0;
  for (int ka = 0; ka < d; ++ka)
    for (int la = 0; la < d; ++la)
      for (int kb = 0; kb < d; ++kb)
        for (int lb = 0; lb < d; ++lb, ++i)
          if ((ka + kb) % 2 != 0) amps[i] = -amps[i];
  return state;
}

namespace {

struct GeneratorCache;
GeneratorCache& generator_cache();

// Key: kind, k_cut, imbalance (ignored for full-space entries), restricted?
using CacheKey = std::tuple<GeneratorKind, int, int, bool>;

struct GeneratorCache {
  std::mutex mutex;
  std::map<CacheKey, std::shared_ptr<const SparseGenerator>> entries;
};

template <class Build>
std::shared_ptr<const SparseGenerator> lookup_or_build(const CacheKey& key, Build&& build) {
  auto& cache = generator_cache();
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.entries.find(key); it != cache.entries.end()) return it->second;
  }
  auto built = std::make_shared<const SparseGenerator>(build());
  std::lock_guard lock(cache.mutex);
  // a concurrent builder may have inserted first; keep that one
  return cache.entries.emplace(key, std::move(built)).first->second;
}


GeneratorCache& generator_cache() {
  static GeneratorCache cache;
  return cache;
}

SparseGenerator build_generator(GeneratorKind kind, const TruncationConfig& cfg) {
  switch (kind) {
    case GeneratorKind::TmsGlobal: return gen_tms_global(cfg);
    case GeneratorKind::TmsLocalA: return gen_tms_local(cfg, Well::A);
    case GeneratorKind::TmsLocalB: return gen_tms_local(cfg, Well::B);
    case GeneratorKind::Split: return gen_split(cfg);
    case GeneratorKind::RotationA: return gen_rotation_y(cfg, Well::A);
    case GeneratorKind::RotationB: return gen_rotation_y(cfg, Well::B);
  }
  throw RangeError("unknown generator kind");
}

}  // namespace

std::shared_ptr<const SparseGenerator> cached_generator(GeneratorKind kind,
                                                        const TruncationConfig& cfg) {
  return lookup_or_build({kind, cfg.k_cut(), 0, false}, [&] { return build_generator(kind, cfg); });
}

std::shared_ptr<const SparseGenerator> cached_generator(GeneratorKind kind,
                                                        const ImbalanceSubspace& sub) {
  return lookup_or_build({kind, sub.config().k_cut(), sub.imbalance(), true},
                         [&] { return restricted_generator(kind, sub); });
}

void clear_generator_cache() {
  auto& cache = generator_cache();
  std::lock_guard lock(cache.mutex);
  cache.entries.clear();
}

ObservableDiag observable(ObservableKind kind, const TruncationConfig& cfg) {
  const int d = cfg.per_mode();
  ObservableDiag op;
  op.values.resize(cfg.dimension());
  std::size_t i = 0;
  for (int ka = 0; ka < d; ++ka)
    for (int la = 0; la < d; ++la)
      for (int kb = 0; kb < d; ++kb)
        for (int lb = 0; lb < d; ++lb, ++i) {
          switch (kind) {
            case ObservableKind::SzA: op.values[i] = ka - la; break;
            case ObservableKind::SzB: op.values[i] = kb - lb; break;
            case ObservableKind::NA: op.values[i] = ka + la; break;
            case ObservableKind::NB: op.values[i] = kb + lb; break;
          }
        }
  return op;
}

double expectation(const ObservableDiag& op, const StateVector& state) {
  if (op.values.size() != state.size()) throw RangeError("observable/state dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) s += op.values[i] * std::norm(state[i]);
  return s;
}

SparseGenerator pair_imbalance_operator(const TruncationConfig& cfg) {
  const auto sa = observable(ObservableKind::SzA, cfg);
  const auto sb = observable(ObservableKind::SzB, cfg);
  std::vector<double> v(sa.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = sa.values[i] + sb.values[i];
  return SparseGenerator::diagonal(v);
}

}  // namespace splitbell
