#pragma once

// Dense linear algebra over GF(2) with bit-packed rows.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace evenscat::gf2 {

/// A row vector over GF(2) of fixed length, packed 64 bits per word.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
  }
  void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  BitVec& operator^=(const BitVec& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
  }
  bool any() const {
    return std::any_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x != 0; });
  }
  /// Index of the lowest set bit, or size() when zero.
  std::size_t lowest() const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(w_[k]));
    return n_;
  }
  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto x : w_) c += static_cast<std::size_t>(std::popcount(x));
    return c;
  }

  /// Copy `bits` low bits of `value` into positions [offset, offset+bits).
  void put_bits(std::size_t offset, unsigned bits, std::uint64_t value) {
    for (unsigned b = 0; b < bits; ++b) set(offset + b, (value >> b) & 1u);
  }
  std::uint64_t get_bits(std::size_t offset, unsigned bits) const {
    std::uint64_t v = 0;
    for (unsigned b = 0; b < bits; ++b) v |= std::uint64_t{get(offset + b)} << b;
    return v;
  }

  friend bool operator==(const BitVec&, const BitVec&) = default;
  friend auto operator<=>(const BitVec& a, const BitVec& b) {
    return std::lexicographical_compare_three_way(a.w_.rbegin(), a.w_.rend(), b.w_.rbegin(),
                                                  b.w_.rend());
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

/// Reduce `rows` in place to reduced row echelon form, pivoting on the lowest
/// set bit of each row. Zero rows are dropped; the survivors are sorted by
/// pivot index. Returns the pivot indices.
inline std::vector<std::size_t> reduce(std::vector<BitVec>& rows) {
  std::vector<BitVec> basis;
  std::vector<std::size_t> pivots;
  for (auto r : rows) {
    for (std::size_t k = 0; k < basis.size(); ++k)
      if (r.get(pivots[k])) r ^= basis[k];
    if (!r.any()) continue;
    const std::size_t p = r.lowest();
    for (auto& b : basis)
      if (b.get(p)) b ^= r;
    basis.push_back(std::move(r));
    pivots.push_back(p);
  }
  std::vector<std::size_t> order(basis.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pivots[a] < pivots[b]; });
  rows.clear();
  std::vector<std::size_t> sorted;
  for (auto k : order) {
    rows.push_back(std::move(basis[k]));
    sorted.push_back(pivots[k]);
  }
  return sorted;
}

inline std::size_t rank(std::vector<BitVec> rows) { return reduce(rows).size(); }

/// Basis of {x : M x = 0} where M has the given column vectors (each of the
/// same length). The result is in reduced echelon form over the unknowns.
inline std::vector<BitVec> nullspace_of_columns(const std::vector<BitVec>& columns) {
  const std::size_t n = columns.size();
  if (n == 0) return {};
  const std::size_t m = columns.front().size();
  // Augment each column with an identity tag and eliminate on the image part.
  std::vector<BitVec> aug;
  aug.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    BitVec v(m + n);
    for (std::size_t i = 0; i < m; ++i)
      if (columns[j].get(i)) v.set(i);
    v.set(m + j);
    aug.push_back(std::move(v));
  }
  std::vector<BitVec> basis;
  std::vector<std::size_t> pivots;
  std::vector<BitVec> kernel;
  for (auto r : aug) {
    for (std::size_t k = 0; k < basis.size(); ++k)
      if (r.get(pivots[k])) r ^= basis[k];
    const std::size_t p = r.lowest();
    if (p >= m) {
      BitVec kv(n);
      for (std::size_t j = 0; j < n; ++j)
        if (r.get(m + j)) kv.set(j);
      kernel.push_back(std::move(kv));
      continue;
    }
    basis.push_back(std::move(r));
    pivots.push_back(p);
  }
  reduce(kernel);
  return kernel;
}

/// True iff v lies in the row space spanned by an echelon basis produced by reduce().
inline bool in_span(const std::vector<BitVec>& echelon, const std::vector<std::size_t>& pivots,
                    BitVec v) {
  for (std::size_t k = 0; k < echelon.size(); ++k)
    if (v.get(pivots[k])) v ^= echelon[k];
  return !v.any();
}

}  // namespace evenscat::gf2
