#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "family.hpp"
#include "fieldcore.hpp"
#include "gf2.hpp"
#include "linpoly.hpp"
#include "parallel.hpp"

namespace evenscat {

/// Coefficient vectors of q-polynomials as GF(2) vectors of length 36e (step-1 form).
namespace detail {

inline gf2::BitVec to_bits(const LinPoly& f) {
  const LinPoly g = f.with_step(1);
  const unsigned d = f.ctx().degree();
  gf2::BitVec v(6 * d);
  for (int i = 0; i < 6; ++i) v.put_bits(static_cast<std::size_t>(i) * d, d, g.coeff(i).bits);
  return v;
}

inline LinPoly from_bits(const FieldCtx& F, const gf2::BitVec& v) {
  const unsigned d = F.degree();
  LinPoly::Coeffs a{};
  for (int i = 0; i < 6; ++i) a[static_cast<std::size_t>(i)] = Felt{v.get_bits(static_cast<std::size_t>(i) * d, d)};
  return LinPoly(F, 1, a);
}

// The GF(2) basis vector with a single bit at position k.
inline LinPoly unit_poly(const FieldCtx& F, std::size_t k) {
  gf2::BitVec v(6 * F.degree());
  v.set(k);
  return from_bits(F, v);
}

}  // namespace detail

/// An F_q-linear (in fact GF(2)-linear) set of q-polynomials, stored as a reduced basis.
class LinearCode {
 public:
  LinearCode(const FieldCtx& F, const std::vector<LinPoly>& generators) : F_(&F) {
    for (const auto& g : generators) rows_.push_back(detail::to_bits(g));
    pivots_ = gf2::reduce(rows_);
  }

  const FieldCtx& ctx() const { return *F_; }
  /// dim over GF(2)
  std::size_t gf2_dim() const { return rows_.size(); }
  /// dim over F_q
  std::size_t dim_q() const { return rows_.size() / F_->e(); }
  bool contains(const LinPoly& f) const { return gf2::in_span(rows_, pivots_, detail::to_bits(f)); }

  /// Coordinates of f outside the code: zero exactly when f is a codeword, and GF(2)-linear in f.
  gf2::BitVec residual(const LinPoly& f) const {
    gf2::BitVec v = detail::to_bits(f);
    for (std::size_t k = 0; k < rows_.size(); ++k)
      if (v.get(pivots_[k])) v ^= rows_[k];
    gf2::BitVec out(v.size() - pivots_.size());
    std::size_t j = 0, p = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (p < pivots_.size() && pivots_[p] == i) {
        ++p;
        continue;
      }
      out.set(j++, v.get(i));
    }
    return out;
  }

  std::vector<LinPoly> basis() const {
    std::vector<LinPoly> out;
    for (const auto& r : rows_) out.push_back(detail::from_bits(*F_, r));
    return out;
  }

  friend bool operator==(const LinearCode& a, const LinearCode& b) { return a.F_ == b.F_ && a.rows_ == b.rows_; }

 private:
  const FieldCtx* F_;
  std::vector<gf2::BitVec> rows_;
  std::vector<std::size_t> pivots_;
};

/// {a X + b f(X) : a, b in F_{q^6}}.
struct RMCode {
  LinPoly f;

  const FieldCtx& ctx() const { return f.ctx(); }

  /// GF(2) generators: w X and w f for a GF(2)-basis w of F_{q^6}.
  std::vector<LinPoly> gf2_generators() const {
    const FieldCtx& F = ctx();
    std::vector<LinPoly> gens;
    for (unsigned i = 0; i < F.degree(); ++i) gens.push_back(LinPoly::monomial(F, 1, 0, Felt{std::uint64_t{1} << i}));
    for (unsigned i = 0; i < F.degree(); ++i) gens.push_back(f.scaled(Felt{std::uint64_t{1} << i}).with_step(1));
    return gens;
  }

  LinearCode as_linear_code() const { return LinearCode(ctx(), gf2_generators()); }
};

inline RMCode build_code(const FieldCtx& F, Felt c, int s) {
  if (c.is_zero()) throw ParameterError("c must be nonzero");
  if (s != 1 && s != 5) throw ParameterError("s must be 1 or 5");
  return RMCode{trinomial(F, c, s)};
}

inline std::size_t dim_q(const RMCode& C) { return C.as_linear_code().dim_q(); }

/// Minimum rank distance via the projective sweep over f and a X + f.
inline int min_distance(const RMCode& C, unsigned threads = 1) {
  const FieldCtx& F = C.ctx();
  const LinPoly f = C.f.with_step(1);
  if (f.is_zero()) return 1;
  // f alone, and X (the b = 0 line) has rank 6
  std::atomic<int> best{std::min(6, rank(dickson_matrix(f)))};
  const auto base = dickson_matrix(f).entries;
  parallel_blocks(0, F.order(), threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      const int cur = best.load(std::memory_order_relaxed);
      if (cur <= 1) return;
      const Felt a = F.element(i);
      auto M = base;
      for (int r = 0; r < 6; ++r) M[r][r] += F.frob(a, r);
      const int rk = detail::rank6(F, M);
      int prev = best.load(std::memory_order_relaxed);
      while (rk < prev && !best.compare_exchange_weak(prev, rk)) {
      }
    }
  });
  // rank 0 would mean f = a X, i.e. the code is not 2-dimensional
  return std::max(best.load(), 0);
}

inline bool is_mrd(const RMCode& C, unsigned threads = 1) {
  const int d = min_distance(C, threads);
  return dim_q(C) == static_cast<std::size_t>(6 * (6 - d + 1));
}

/// A GF(2)-subspace of q-polynomials given by a basis.
struct Idealizer {
  std::vector<LinPoly> gf2_basis;

  std::size_t log2_order() const { return gf2_basis.size(); }
  std::uint64_t order() const { return std::uint64_t{1} << gf2_basis.size(); }
};

namespace detail {

// Solve { phi : constraint(phi) = 0 } where constraint is GF(2)-linear in phi.
template <class Constraint>
Idealizer solve_idealizer(const FieldCtx& F, Constraint&& constraint) {
  const std::size_t n = 6 * F.degree();
  std::vector<gf2::BitVec> columns;
  columns.reserve(n);
  for (std::size_t k = 0; k < n; ++k) columns.push_back(constraint(unit_poly(F, k)));
  Idealizer I;
  for (const auto& v : gf2::nullspace_of_columns(columns)) I.gf2_basis.push_back(from_bits(F, v));
  return I;
}

inline gf2::BitVec concat(const std::vector<gf2::BitVec>& parts) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.size();
  gf2::BitVec out(n);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p.get(i)) out.set(off + i);
    off += p.size();
  }
  return out;
}

}  // namespace detail

/// {phi : g o phi in C for all g in C}; C is closed under left scaling, so X and f suffice.
inline Idealizer right_idealizer(const RMCode& C) {
  const LinearCode L = C.as_linear_code();
  const LinPoly f = C.f.with_step(1);
  return detail::solve_idealizer(C.ctx(), [&](const LinPoly& phi) {
    return detail::concat({L.residual(phi), L.residual(compose(f, phi))});
  });
}

/// {phi : phi o g in C for all g in C}, over a GF(2)-basis of C.
inline Idealizer left_idealizer(const RMCode& C) {
  const LinearCode L = C.as_linear_code();
  const auto gens = C.gf2_generators();
  return detail::solve_idealizer(C.ctx(), [&](const LinPoly& phi) {
    std::vector<gf2::BitVec> parts;
    for (const auto& g : gens) parts.push_back(L.residual(compose(phi, g)));
    return detail::concat(parts);
  });
}

/// {g^ : g in C}. Since (b f)^ = f^ o (b X), this is {a X + f^(b X)}.
inline LinearCode adjoint_code(const LinearCode& C) {
  std::vector<LinPoly> gens;
  for (const auto& g : C.basis()) gens.push_back(adjoint(g));
  return LinearCode(C.ctx(), gens);
}

inline LinearCode adjoint_code(const RMCode& C) { return adjoint_code(C.as_linear_code()); }

/// {a X + g(b X)}: the span of X and g with scalars acting on the right of g.
inline LinearCode right_span_code(const LinPoly& g) {
  const FieldCtx& F = g.ctx();
  std::vector<LinPoly> gens;
  const LinPoly g1 = g.with_step(1);
  for (unsigned i = 0; i < F.degree(); ++i) {
    const Felt w{std::uint64_t{1} << i};
    gens.push_back(LinPoly::monomial(F, 1, 0, w));
    gens.push_back(compose(g1, LinPoly::monomial(F, 1, 0, w)));
  }
  return LinearCode(F, gens);
}

/// Minimum rank over all nonzero codewords, by enumeration. Small codes only.
inline int min_distance_bruteforce(const LinearCode& C) {
  if (C.gf2_dim() > 24) throw FeasibilityError("code too large to enumerate");
  const auto basis = C.basis();
  int best = 6;
  const std::uint64_t count = std::uint64_t{1} << basis.size();
  for (std::uint64_t m = 1; m < count; ++m) {
    LinPoly w = LinPoly::zero(C.ctx());
    for (std::size_t k = 0; k < basis.size(); ++k)
      if ((m >> k) & 1u) w = w + basis[k];
    best = std::min(best, rank(dickson_matrix(w)));
  }
  return best;
}

enum class EquivBranch { same_s, opposite_s };

/// Branch same_s:     D f_2(X) = f_1^rho(A X).
/// Branch opposite_s: f_1^rho(B f_2(X)) = C X.
struct EquivWitness {
  unsigned rho = 0;  // x -> x^{2^rho}
  EquivBranch branch = EquivBranch::same_s;
  Felt A = kZero, B = kZero, C = kZero, D = kZero;
  bool closed_form = true;  // false when B, C came from solving the linear system instead
  bool heuristic = false;   // an input lies outside the admissible set
};

/// (c^{q^{3s}+q^s} + 1)(c^{q^{5s}} + 1) / (c + 1)^{q^s + q^{3s}}
inline Felt opposite_branch_value(const FieldCtx& F, Felt c, int s) {
  const auto fr = [&](int j) { return F.frob(c, s * j); };
  const Felt num = F.mul(F.mul(fr(3), fr(1)) + kOne, fr(5) + kOne);
  const Felt c1 = c + kOne;
  return F.div(num, F.mul(F.frob(c1, s), F.frob(c1, 3 * s)));
}

/// Determinant of the 3x3 system in B^{q^s}, B^{q^{3s}}, B^{q^{5s}}.
inline Felt equivalence_system_det(const FieldCtx& F, Felt c1rho, Felt c2, int s) {
  return determinant(F, {{F.frob(c2, s), kOne, c1rho},
                         {kOne, F.frob(c2, 3 * s), c1rho},
                         {kOne, kOne, F.mul(c1rho, F.frob(c2, 5 * s))}});
}

inline bool validate(const FieldCtx& F, Felt c1, int s, Felt c2, int t, const EquivWitness& w) {
  const LinPoly f1r = conjugate(trinomial(F, c1, s), w.rho).with_step(1);
  const LinPoly f2 = trinomial(F, c2, t).with_step(1);
  const auto scalar = [&](Felt x) { return LinPoly::monomial(F, 1, 0, x); };
  if (w.branch == EquivBranch::same_s) {
    if (w.A.is_zero() || w.D.is_zero()) return false;
    return f2.scaled(w.D) == compose(f1r, scalar(w.A));
  }
  if (w.B.is_zero() || w.C.is_zero()) return false;
  return compose(f1r, f2.scaled(w.B)) == scalar(w.C);
}

namespace detail {

// Solve f_1^rho(B f_2(X)) = X for B directly, by Cramer's rule on the coefficient system.
inline std::optional<Felt> solve_opposite_B(const FieldCtx& F, Felt c1rho, Felt c2, int s) {
  const LinPoly f1r = trinomial(F, c1rho, s).with_step(1);
  const LinPoly f2 = trinomial(F, c2, 6 - s).with_step(1);
  // f1r o (B f2) has coefficient k = sum_i a_i (B b_j)^{q^i}; unknowns u_i = B^{q^i} at the support of f1r
  std::vector<int> support;
  for (int i = 0; i < 6; ++i)
    if (!f1r.coeff(i).is_zero()) support.push_back(i);
  const std::size_t n = support.size();
  std::vector<std::vector<Felt>> M(6, std::vector<Felt>(n, kZero));
  for (std::size_t u = 0; u < n; ++u) {
    const int i = support[u];
    for (int j = 0; j < 6; ++j)
      M[static_cast<std::size_t>((i + j) % 6)][u] += F.mul(f1r.coeff(i), F.frob(f2.coeff(j), i));
  }
  // pick n rows containing the X coefficient that give an invertible system
  std::vector<int> rows{0};
  for (int k = 1; k < 6 && rows.size() < n; ++k) {
    bool nonzero = false;
    for (std::size_t u = 0; u < n; ++u) nonzero |= !M[static_cast<std::size_t>(k)][u].is_zero();
    if (nonzero) rows.push_back(k);
  }
  if (rows.size() != n) return std::nullopt;
  std::vector<std::vector<Felt>> A;
  for (int r : rows) A.push_back(M[static_cast<std::size_t>(r)]);
  const Felt det = determinant(F, A);
  if (det.is_zero()) return std::nullopt;
  // unknown for exponent support[0]
  auto Au = A;
  for (std::size_t r = 0; r < n; ++r) Au[r][0] = r == 0 ? kOne : kZero;
  const Felt u0 = F.div(determinant(F, Au), det);
  return F.frob(u0, -support[0]);
}

}  // namespace detail

/// Decides equivalence of D_{c1,s} and D_{c2,t} by the closed-form criteria, returning a validated witness.
inline std::optional<EquivWitness> codes_equivalent(const FieldCtx& F, Felt c1, int s, Felt c2, int t) {
  if ((s != 1 && s != 5) || (t != 1 && t != 5)) throw ParameterError("s and t must be 1 or 5");
  const bool heuristic = !in_frak_c(F, c1) || !in_frak_c(F, c2);
  for (unsigned rho = 0; rho < F.degree(); ++rho) {
    const Felt c1r = F.automorphism(c1, rho);
    EquivWitness w;
    w.rho = rho;
    w.heuristic = heuristic;
    if (s == t) {
      if (c1r != c2) continue;
      w.branch = EquivBranch::same_s;
      w.A = w.D = kOne;
      if (validate(F, c1, s, c2, t, w)) return w;
      continue;
    }
    if (c2 == kOne || c1r != opposite_branch_value(F, c2, s)) continue;
    w.branch = EquivBranch::opposite_s;
    const Felt nt = F.norm(c2, 2) + F.trace(c2, 2);
    const Felt c2p = c2 + kOne;
    if (!nt.is_zero()) {
      // mu = 1
      w.B = F.div(F.frob(c2p, 2 * s), F.mul(nt, F.mul(c2p, F.frob(c2p, 2 * s))));
      w.C = F.inv(F.mul(F.frob(c2p, s), F.frob(c2p, 3 * s)));
      if (validate(F, c1, s, c2, t, w)) return w;
    }
    if (auto B = detail::solve_opposite_B(F, c1r, c2, s)) {
      w.B = *B;
      w.C = kOne;
      w.closed_form = false;
      if (validate(F, c1, s, c2, t, w)) return w;
    }
  }
  return std::nullopt;
}

struct Rational {
  std::uint64_t num = 0, den = 1;

  static Rational make(std::uint64_t n, std::uint64_t d) {
    const std::uint64_t g = std::gcd(n, d);
    return g ? Rational{n / g, d / g} : Rational{0, 1};
  }
  bool at_most(std::uint64_t k) const { return num <= k * den; }
};

/// (|C| / (6e), |C| / (12e + 1)).
inline std::pair<Rational, Rational> class_count_bounds(std::uint64_t frak_c_size, unsigned e) {
  return {Rational::make(frak_c_size, 6 * e), Rational::make(frak_c_size, 12 * e + 1)};
}

struct CodeClass {
  std::vector<std::pair<Felt, int>> members;  // (c, s), sorted
};

struct EquivEdge {
  std::pair<Felt, int> from, to;
  EquivWitness witness;
};

struct Partition {
  std::vector<CodeClass> classes;
  std::vector<EquivEdge> edges;  // the merges that built the classes
  std::size_t witnesses_checked = 0;
};

/// Equivalence classes of {D_{c,s} : c in cs, s in {1, 5}}.
///
/// For each (c1, s) and automorphism rho the partner c2 is looked up from c1^rho
/// (branch i) or from a table of the branch-ii values; every edge is confirmed by
/// codes_equivalent before it is merged.
inline Partition partition_codes(const FieldCtx& F, const std::vector<Felt>& cs,
                                 const std::vector<int>& steps = {1, 5}) {
  const auto use = [&](int s) { return std::find(steps.begin(), steps.end(), s) != steps.end(); };
  const std::size_t n = cs.size();
  const auto node = [&](std::size_t i, int s) { return 2 * i + (s == 5 ? 1 : 0); };
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<Felt, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[cs[i]] = i;
  // value -> indices j with opposite_branch_value(c_j, s) == value, per s
  std::map<std::pair<int, Felt>, std::vector<std::size_t>> opposite;
  for (std::size_t j = 0; j < n; ++j)
    for (int s : {1, 5})
      if (cs[j] != kOne) opposite[{s, opposite_branch_value(F, cs[j], s)}].push_back(j);
  Partition P;
  for (std::size_t i = 0; i < n; ++i)
    for (int s : {1, 5})
      for (unsigned rho = 0; use(s) && rho < F.degree(); ++rho) {
        const Felt c1r = F.automorphism(cs[i], rho);
        std::vector<std::pair<std::size_t, int>> partners;
        if (auto it = index.find(c1r); it != index.end()) partners.push_back({it->second, s});
        if (auto it = opposite.find({s, c1r}); use(6 - s) && it != opposite.end())
          for (std::size_t j : it->second) partners.push_back({j, 6 - s});
        for (auto [j, t] : partners) {
          const std::size_t a = find(node(i, s)), b = find(node(j, t));
          if (a == b) continue;
          ++P.witnesses_checked;
          if (auto w = codes_equivalent(F, cs[i], s, cs[j], t)) {
            parent[std::max(a, b)] = std::min(a, b);
            P.edges.push_back({{cs[i], s}, {cs[j], t}, *w});
          }
        }
      }
  std::map<std::size_t, CodeClass> by_root;
  for (std::size_t i = 0; i < n; ++i)
    for (int s : {1, 5})
      if (use(s)) by_root[find(node(i, s))].members.push_back({cs[i], s});
  for (auto& [root, cls] : by_root) {
    std::sort(cls.members.begin(), cls.members.end());
    P.classes.push_back(std::move(cls));
  }
  return P;
}

}  // namespace evenscat
