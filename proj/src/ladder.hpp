#pragma once

// Assembly of sparse generators from normal-ordered ladder monomials over an
// arbitrary enumerated occupation basis.

#include "splitbell/operators.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace splitbell::detail {

/// coef * prod_m (a_m^dag)^create[m] (a_m)^annihilate[m]
template <std::size_t M>
struct LadderTerm {
  Amplitude coef;
  std::array<int, M> create{};
  std::array<int, M> annihilate{};
};

/// Basis concept: size(), occupations(i) -> std::array<int, M>,
/// find(occ) -> std::optional<std::size_t> (nullopt when outside the basis).
template <std::size_t M, class Basis>
SparseGenerator assemble(const Basis& basis, const std::vector<LadderTerm<M>>& terms) {
  std::vector<SparseGenerator::Entry> entries;
  entries.reserve(basis.size() * terms.size());
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const std::array<int, M> occ = basis.occupations(col);
    for (const auto& term : terms) {
      std::array<int, M> out = occ;
      double factor = 1.0;
      bool alive = true;
      for (std::size_t m = 0; m < M && alive; ++m) {
        const int n = occ[m];
        const int q = term.annihilate[m];
        const int c = term.create[m];
        if (n < q) {
          alive = false;
          break;
        }
        const int low = n - q;
        for (int j = low + 1; j <= n; ++j) factor *= std::sqrt(static_cast<double>(j));
        for (int j = low + 1; j <= low + c; ++j) factor *= std::sqrt(static_cast<double>(j));
        out[m] = low + c;
      }
      if (!alive) continue;
      // raising terms that would leave the basis are omitted
      const std::optional<std::size_t> row = basis.find(out);
      if (!row) continue;
      entries.push_back({*row, col, term.coef * factor});
    }
  }
  return SparseGenerator::from_entries(basis.size(), std::move(entries));
}

}  // namespace splitbell::detail
