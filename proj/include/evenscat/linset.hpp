#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <vector>

#include "errors.hpp"
#include "fieldcore.hpp"
#include "parallel.hpp"
#include "scatter.hpp"

namespace evenscat {

/// A point of PG(1, q^6), normalized so that the first nonzero coordinate is 1.
struct ProjPoint {
  Felt x, y;

  static ProjPoint normalize(const FieldCtx& F, Felt x, Felt y) {
    if (!x.is_zero()) return {kOne, F.div(y, x)};
    if (y.is_zero()) throw DegenerateInputError("(0, 0) is not a projective point");
    return {kZero, kOne};
  }

  friend auto operator<=>(const ProjPoint&, const ProjPoint&) = default;
};

struct LinearSet {
  const FieldCtx* ctx = nullptr;
  std::vector<ProjPoint> points;  // sorted
  std::vector<int> weights;       // weights[i] belongs to points[i]

  std::size_t size() const { return points.size(); }

  std::map<int, std::uint64_t> weight_histogram() const {
    std::map<int, std::uint64_t> h;
    for (int w : weights) ++h[w];
    return h;
  }
};

/// L_U for U = U_f: the points <(x, f(x))> with their weights dim_{F_q}(U meet the point).
///
/// Only F_q^*-coset representatives g^i are visited; a point of weight w collects
/// (q^w - 1)/(q - 1) of them.
inline LinearSet linear_set(const Subspace& U, unsigned threads = 1) {
  const FieldCtx& F = U.ctx();
  const std::uint64_t reps = (F.order() - 1) / (F.q() - 1);
  std::vector<std::atomic<std::uint32_t>> count(F.order());
  const Felt g = F.generator(), ginv = F.inv(g);
  parallel_blocks(0, reps, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    Felt x = F.pow(g, lo), xinv = F.pow(ginv, lo);
    for (std::uint64_t i = lo; i < hi; ++i) {
      count[F.mul(U.f(x), xinv).bits].fetch_add(1, std::memory_order_relaxed);
      x = F.mul(x, g);
      xinv = F.mul(xinv, ginv);
    }
  });
  LinearSet L;
  L.ctx = &F;
  for (std::uint64_t v = 0; v < F.order(); ++v) {
    const std::uint64_t n = count[v].load(std::memory_order_relaxed);
    if (n == 0) continue;
    // n (q - 1) = q^w - 1
    std::uint64_t total = n * (F.q() - 1) + 1, w = 0;
    while (total > 1) {
      total /= F.q();
      ++w;
    }
    L.points.push_back({kOne, Felt{v}});
    L.weights.push_back(static_cast<int>(w));
  }
  return L;
}

inline bool is_maximum_scattered_linset(const LinearSet& L) {
  const FieldCtx& F = *L.ctx;
  if (L.size() != (F.order() - 1) / (F.q() - 1)) return false;
  return std::all_of(L.weights.begin(), L.weights.end(), [](int w) { return w == 1; });
}

inline bool sets_equal(const LinearSet& a, const LinearSet& b) {
  if (a.ctx != b.ctx) throw ParameterError("linear sets live in different fields");
  return a.points == b.points;
}

/// Size of the symmetric difference of the two point sets.
inline std::uint64_t set_difference_size(const LinearSet& a, const LinearSet& b) {
  if (a.ctx != b.ctx) throw ParameterError("linear sets live in different fields");
  std::vector<ProjPoint> diff;
  std::set_symmetric_difference(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                                std::back_inserter(diff));
  return diff.size();
}

/// L^{1,6}_s = {(1 : x^{q^s - 1})}.
inline LinearSet pseudoregulus(const FieldCtx& F, int s = 1, unsigned threads = 1) {
  return linear_set(family_subspace(F, FamilyKind::a, s), threads);
}

}  // namespace evenscat
