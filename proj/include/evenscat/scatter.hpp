#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "fieldcore.hpp"
#include "linpoly.hpp"
#include "parallel.hpp"

namespace evenscat {

/// U_f = {(x, f(x)) : x in F_{q^6}}.
struct Subspace {
  LinPoly f;

  const FieldCtx& ctx() const { return f.ctx(); }
  std::uint64_t size() const { return ctx().order(); }
  bool contains(Felt x, Felt y) const { return f(x) == y; }
};

inline Subspace subspace_of(const LinPoly& f) { return Subspace{f}; }

/// Scatteredness via the values f(x)/x.
///
/// f(x)/x is constant on F_q^*-cosets, and g^i for 0 <= i < (q^6-1)/(q-1) is a
/// full set of coset representatives. The map is scattered exactly when these
/// representatives give pairwise distinct values, i.e. every fiber has q-1 elements.
inline bool is_scattered_fibers(const LinPoly& f, unsigned threads = 1) {
  const FieldCtx& F = f.ctx();
  const std::uint64_t reps = (F.order() - 1) / (F.q() - 1);
  const Felt g = F.generator();
  const Felt ginv = F.inv(g);
  std::vector<std::atomic<std::uint64_t>> seen((F.order() + 63) / 64);
  std::atomic<bool> collision{false};
  parallel_blocks(0, reps, threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    Felt x = F.pow(g, lo);
    Felt xinv = F.pow(ginv, lo);
    for (std::uint64_t i = lo; i < hi; ++i) {
      if ((i & 0xfff) == 0 && collision.load(std::memory_order_relaxed)) return;
      const std::uint64_t v = F.mul(f(x), xinv).bits;
      const std::uint64_t bit = std::uint64_t{1} << (v & 63);
      if (seen[v >> 6].fetch_or(bit, std::memory_order_relaxed) & bit) {
        collision.store(true, std::memory_order_relaxed);
        return;
      }
      x = F.mul(x, g);
      xinv = F.mul(xinv, ginv);
    }
  });
  return !collision.load();
}

/// Scatteredness via rank(D_f^{(m)}) >= 5 for every m.
inline bool is_scattered_dickson(const LinPoly& f, unsigned threads = 1) {
  const FieldCtx& F = f.ctx();
  const auto base = dickson_matrix(f).entries;
  const int s = f.step();
  std::atomic<bool> deficient{false};
  parallel_blocks(0, F.order(), threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      if ((i & 0x3ff) == 0 && deficient.load(std::memory_order_relaxed)) return;
      const Felt m = F.element(i);
      auto M = base;
      for (int r = 0; r < 6; ++r) M[r][r] += F.frob(m, s * r);
      if (detail::rank6(F, M, 5) < 5) {
        deficient.store(true, std::memory_order_relaxed);
        return;
      }
    }
  });
  return !deficient.load();
}

/// Selects p or one of q_0..q_5 in system_poly_eval.
enum class SystemPoly { p, q0, q1, q2, q3, q4, q5 };

namespace detail {

// The 6x6 matrix of f_{c,1} with free diagonal v; conj[j] = c^{q^j}.
inline std::vector<std::vector<Felt>> system_matrix(const std::array<Felt, 6>& conj,
                                                    const std::array<Felt, 6>& v) {
  std::vector<std::vector<Felt>> M(6, std::vector<Felt>(6, kZero));
  for (int i = 0; i < 6; ++i) {
    M[i][i] = v[i];
    M[i][(i + 1) % 6] = kOne;
    M[i][(i + 3) % 6] = kOne;
    M[i][(i + 5) % 6] = conj[i];
  }
  return M;
}

}  // namespace detail

/// Evaluates p (the 6x6 determinant) or q_k (the 5x5 minor obtained by dropping
/// the first column and last row, with all indices shifted by k).
inline Felt system_poly_eval(const FieldCtx& F, Felt c, const std::array<Felt, 6>& point,
                             SystemPoly which) {
  const int k = which == SystemPoly::p ? 0 : static_cast<int>(which) - 1;
  std::array<Felt, 6> conj{}, v{};
  for (int j = 0; j < 6; ++j) {
    conj[j] = F.frob(c, j + k);
    v[j] = point[(j + k) % 6];
  }
  auto M = detail::system_matrix(conj, v);
  if (which == SystemPoly::p) return determinant(F, std::move(M));
  M.pop_back();
  for (auto& row : M) row.erase(row.begin());
  return determinant(F, std::move(M));
}

/// (x, y) -> (A x^rho + B y^rho, C x^rho + D y^rho), rho = x -> x^{2^r}.
struct GammaLWitness {
  Felt A, B, C, D;
  unsigned r;
};

inline bool maps_onto(const Subspace& U1, const Subspace& U2, const GammaLWitness& w) {
  const FieldCtx& F = U1.ctx();
  if ((F.mul(w.A, w.D) + F.mul(w.B, w.C)).is_zero()) return false;
  for (std::uint64_t i = 0; i < F.order(); ++i) {
    const Felt x = F.automorphism(F.element(i), w.r);
    const Felt y = F.automorphism(U1.f(F.element(i)), w.r);
    const Felt u = F.mul(w.A, x) + F.mul(w.B, y);
    const Felt v = F.mul(w.C, x) + F.mul(w.D, y);
    if (!U2.contains(u, v)) return false;
  }
  return true;
}

/// Exhaustive GammaL(2, 2^6) equivalence test.
///
/// For each automorphism rho and each (A, B) != 0 the first coordinate map
/// y -> A y + B f1^rho(y) is fixed; the remaining (C, D) are then forced by
/// linear algebra on the coefficients of f2(A X + B f1^rho).
inline std::optional<GammaLWitness> gammaL_equivalent_bruteforce(const Subspace& U1,
                                                                 const Subspace& U2) {
  const FieldCtx& F = U1.ctx();
  if (&F != &U2.ctx()) throw ParameterError("subspaces over different fields");
  if (F.e() != 1) throw FeasibilityError("exhaustive GammaL search is limited to q = 2");
  const LinPoly f1 = U1.f.with_step(1), f2 = U2.f.with_step(1);
  for (unsigned r = 0; r < F.degree(); ++r) {
    const LinPoly g = conjugate(f1, r);
    int lead = 0;
    for (int j = 1; j < 6; ++j)
      if (!g.coeff(j).is_zero()) {
        lead = j;
        break;
      }
    for (std::uint64_t a = 0; a < F.order(); ++a)
      for (std::uint64_t b = 0; b < F.order(); ++b) {
        if (a == 0 && b == 0) continue;
        const Felt A = F.element(a), B = F.element(b);
        LinPoly::Coeffs t = g.scaled(B).coeffs();
        t[0] += A;
        const LinPoly h = compose(f2, LinPoly(F, 1, t));
        auto try_pair = [&](Felt C, Felt D) -> std::optional<GammaLWitness> {
          if ((F.mul(A, D) + F.mul(B, C)).is_zero()) return std::nullopt;
          GammaLWitness w{A, B, C, D, r};
          if (!maps_onto(U1, U2, w)) return std::nullopt;
          return w;
        };
        if (lead != 0) {
          const Felt D = F.div(h.coeff(lead), g.coeff(lead));
          bool ok = true;
          for (int j = 1; j < 6 && ok; ++j) ok = h.coeff(j) == F.mul(D, g.coeff(j));
          if (!ok) continue;
          if (auto w = try_pair(h.coeff(0) + F.mul(D, g.coeff(0)), D)) return w;
        } else {
          bool ok = true;
          for (int j = 1; j < 6 && ok; ++j) ok = h.coeff(j).is_zero();
          if (!ok) continue;
          for (std::uint64_t d = 0; d < F.order(); ++d) {
            const Felt D = F.element(d);
            if (auto w = try_pair(h.coeff(0) + F.mul(D, g.coeff(0)), D)) return w;
          }
        }
      }
  }
  return std::nullopt;
}

enum class FamilyKind { a, b, c_half };

/// Known subspace families: X^{q^s}, delta X^{q^s} + X^{q^{6-s}}, delta X^{q^s} + X^{q^{s+3}}.
inline Subspace family_subspace(const FieldCtx& F, FamilyKind kind, int s, Felt delta = kZero) {
  const int sm = ((s % 6) + 6) % 6;
  auto nondegenerate_norm = [&](int ell) {
    const Felt n = F.norm(delta, ell);
    return !n.is_zero() && n != kOne;
  };
  LinPoly::Coeffs a{};
  switch (kind) {
    case FamilyKind::a:
      if (std::gcd(sm, 6) != 1) throw ParameterError("family (a) needs gcd(s, 6) = 1");
      a[sm] = kOne;
      break;
    case FamilyKind::b:
      if (std::gcd(sm, 6) != 1) throw ParameterError("family (b) needs gcd(s, 6) = 1");
      if (!nondegenerate_norm(1)) throw ParameterError("family (b) needs N_{q^6/q}(delta) not in {0, 1}");
      a[sm] = delta;
      a[6 - sm] += kOne;
      break;
    case FamilyKind::c_half:
      if (sm % 3 == 0) throw ParameterError("family (c) needs gcd(s, 3) = 1");
      if (!nondegenerate_norm(3)) throw ParameterError("family (c) needs N_{q^6/q^3}(delta) not in {0, 1}");
      a[sm] = delta;
      a[(sm + 3) % 6] += kOne;
      break;
  }
  return Subspace{LinPoly(F, 1, a)};
}

}  // namespace evenscat
