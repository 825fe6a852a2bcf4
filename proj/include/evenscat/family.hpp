#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fieldcore.hpp"
#include "linpoly.hpp"
#include "parallel.hpp"
#include "scatter.hpp"

namespace evenscat {

/// Exponent vector (k_0, ..., k_5) of the monomial prod_j (c^{q^j})^{k_j}; all coefficients are 1.
using Exps = std::array<std::uint8_t, 6>;

namespace tables {

inline constexpr Exps kF1[] = {
    {1, 1, 1, 2, 1, 0}, {1, 0, 1, 1, 1, 0}, {1, 1, 0, 1, 0, 0}, {1, 0, 0, 0, 0, 0},
    {0, 1, 1, 2, 0, 0}, {0, 1, 1, 1, 0, 0}, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 0},
};

inline constexpr Exps kF2[] = {
    {2, 2, 1, 1, 0, 0}, {2, 1, 1, 0, 0, 0}, {1, 2, 2, 1, 0, 0}, {1, 1, 2, 2, 0, 0},
    {1, 1, 1, 0, 0, 0}, {1, 1, 0, 1, 0, 0}, {1, 0, 1, 1, 0, 0}, {1, 0, 0, 0, 0, 0},
    {0, 1, 1, 2, 0, 0}, {0, 1, 1, 1, 0, 0}, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 0},
};

inline constexpr Exps kF3[] = {{1, 1, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 0}};

inline constexpr Exps kF4[] = {
    {4, 1, 2, 0, 0, 0}, {3, 2, 3, 0, 0, 0}, {3, 2, 1, 0, 0, 0}, {3, 1, 3, 0, 0, 0}, {3, 1, 1, 0, 0, 0},
    {3, 0, 2, 0, 0, 0}, {3, 0, 1, 0, 0, 0}, {2, 1, 4, 0, 0, 0}, {2, 1, 0, 0, 0, 0}, {2, 0, 3, 0, 0, 0},
    {2, 0, 0, 0, 0, 0}, {1, 2, 3, 0, 0, 0}, {1, 2, 1, 0, 0, 0}, {1, 1, 3, 0, 0, 0}, {1, 1, 1, 0, 0, 0},
    {1, 0, 3, 0, 0, 0}, {1, 0, 0, 0, 0, 0}, {0, 1, 2, 0, 0, 0}, {0, 0, 2, 0, 0, 0}, {0, 0, 1, 0, 0, 0},
};

inline constexpr Exps kF5[] = {
    {2, 1, 2, 0, 0, 0}, {2, 1, 1, 0, 0, 0}, {2, 0, 2, 0, 0, 0},
    {1, 1, 2, 0, 0, 0}, {1, 1, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 0},
};

inline constexpr Exps kA1[] = {
    {1, 2, 1, 1, 1, 1}, {1, 2, 1, 1, 0, 1}, {1, 2, 1, 0, 0, 0}, {1, 2, 0, 0, 0, 0}, {1, 1, 1, 1, 1, 0},
    {1, 1, 1, 1, 0, 0}, {1, 1, 1, 0, 1, 1}, {1, 1, 1, 0, 0, 1}, {1, 0, 1, 0, 1, 0}, {1, 0, 0, 0, 0, 0},
    {0, 2, 1, 0, 0, 0}, {0, 2, 0, 1, 1, 1}, {0, 2, 0, 1, 0, 1}, {0, 2, 0, 0, 0, 0}, {0, 1, 0, 1, 1, 0},
    {0, 1, 0, 1, 0, 0}, {0, 1, 0, 0, 1, 1}, {0, 1, 0, 0, 0, 1}, {0, 0, 1, 0, 0, 0}, {0, 0, 0, 0, 1, 0},
};

inline constexpr Exps kA2[] = {
    {1, 1, 1, 1, 1, 1}, {1, 1, 0, 0, 0, 0}, {1, 0, 1, 0, 1, 0}, {1, 0, 0, 0, 0, 1}, {0, 1, 1, 0, 0, 0},
    {0, 1, 0, 1, 0, 1}, {0, 0, 1, 1, 0, 0}, {0, 0, 0, 1, 1, 0}, {0, 0, 0, 0, 1, 1}, {0, 0, 0, 0, 0, 0},
};

inline constexpr Exps kA3[] = {
    {1, 1, 0, 0, 1, 1}, {1, 1, 0, 0, 0, 1}, {1, 1, 0, 0, 0, 0},
    {1, 0, 0, 0, 1, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0},
};

inline constexpr Exps kA4[] = {
    {0, 0, 1, 1, 1, 1}, {0, 0, 1, 1, 1, 0}, {0, 0, 1, 1, 0, 0},
    {0, 0, 1, 0, 0, 0}, {0, 0, 0, 1, 0, 1}, {0, 0, 0, 0, 0, 0},
};

}  // namespace tables

/// Conjugates c^{q^j} and their small powers, shared by all table evaluations.
class ConjugatePowers {
 public:
  static constexpr int kMaxPow = 4;

  ConjugatePowers(const FieldCtx& F, Felt c) : F_(&F) {
    for (int j = 0; j < 6; ++j) {
      pw_[j][0] = kOne;
      pw_[j][1] = F.frob(c, j);
      for (int k = 2; k <= kMaxPow; ++k) pw_[j][k] = F.mul(pw_[j][k - 1], pw_[j][1]);
    }
  }

  Felt monomial(const Exps& k) const {
    Felt m = kOne;
    for (int j = 0; j < 6; ++j)
      if (k[j]) m = F_->mul(m, pw_[j][k[j]]);
    return m;
  }

  Felt sum(std::span<const Exps> table) const {
    Felt s = kZero;
    for (const auto& k : table) s += monomial(k);
    return s;
  }

 private:
  const FieldCtx* F_;
  std::array<std::array<Felt, kMaxPow + 1>, 6> pw_{};
};

inline std::span<const Exps> f_table(int i) {
  switch (i) {
    case 1: return tables::kF1;
    case 2: return tables::kF2;
    case 3: return tables::kF3;
    case 4: return tables::kF4;
    case 5: return tables::kF5;
    default: throw ParameterError("F index must be in 1..5");
  }
}

inline std::span<const Exps> a_table(int i) {
  switch (i) {
    case 1: return tables::kA1;
    case 2: return tables::kA2;
    case 3: return tables::kA3;
    case 4: return tables::kA4;
    default: throw ParameterError("A index must be in 1..4");
  }
}

inline Felt eval_F(const FieldCtx& F, int i, Felt c) { return ConjugatePowers(F, c).sum(f_table(i)); }
inline Felt eval_A(const FieldCtx& F, int i, Felt c) { return ConjugatePowers(F, c).sum(a_table(i)); }

struct LemmaChecks {
  bool not_in_Fq2 = false;
  bool not_in_Fq3 = false;
  bool norm_ne_1 = false;             // N_{q^6/q^2}(c) != 1
  bool norm_plus_trace_ne_0 = false;  // N_{q^6/q^2}(c) + Tr_{q^6/q^2}(c) != 0

  bool all() const { return not_in_Fq2 && not_in_Fq3 && norm_ne_1 && norm_plus_trace_ne_0; }
};

inline LemmaChecks lemma_checks(const FieldCtx& F, Felt c) {
  const Felt n = F.norm(c, 2);
  return {!F.in_subfield(c, 2), !F.in_subfield(c, 3), n != kOne, !(n + F.trace(c, 2)).is_zero()};
}

struct FrakCRecord {
  Felt c;
  std::array<Felt, 5> f_values{};  // F_1(c), ..., F_5(c)
  bool in_frak_c = false;
  LemmaChecks lemmas;
  std::optional<bool> scattered_s1;  // filled only when requested

  bool not_in_Fq2() const { return lemmas.not_in_Fq2; }
};

inline FrakCRecord frak_c_record(const FieldCtx& F, Felt c) {
  const ConjugatePowers P(F, c);
  FrakCRecord r;
  r.c = c;
  for (int i = 1; i <= 5; ++i) r.f_values[i - 1] = P.sum(f_table(i));
  r.lemmas = lemma_checks(F, c);
  r.in_frak_c = r.f_values[0].is_zero() && r.f_values[1].is_zero() && !r.f_values[2].is_zero() &&
                !r.f_values[3].is_zero() && !r.f_values[4].is_zero() && r.lemmas.not_in_Fq2;
  return r;
}

inline bool in_frak_c(const FieldCtx& F, Felt c) { return frak_c_record(F, c).in_frak_c; }

struct EnumerateOptions {
  bool scatter = false;  // fill scattered_s1 for each returned record
  unsigned threads = 1;
};

/// Every c with F_1(c) = F_2(c) = 0, sorted by value; in_frak_c marks membership in the set.
inline std::vector<FrakCRecord> enumerate_frak_C(const FieldCtx& F, const EnumerateOptions& opt = {}) {
  if (F.e() > 4)
    std::clog << "evenscat: warning: scanning 2^" << F.degree() << " elements; this may not finish in practice\n";
  const unsigned threads = std::max(1u, opt.threads);
  std::vector<std::vector<Felt>> found(threads);
  parallel_blocks(0, F.order(), threads, [&](std::uint64_t lo, std::uint64_t hi, unsigned w) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Felt c = F.element(i);
      const ConjugatePowers P(F, c);
      if (P.sum(tables::kF1).is_zero() && P.sum(tables::kF2).is_zero()) found[w].push_back(c);
    }
  });
  std::vector<FrakCRecord> out;
  for (const auto& part : found)
    for (Felt c : part) out.push_back(frak_c_record(F, c));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.c < b.c; });
  if (opt.scatter)
    for (auto& r : out) r.scattered_s1 = is_scattered_fibers(trinomial(F, r.c, 1), threads);
  return out;
}

inline std::vector<Felt> frak_c_elements(const std::vector<FrakCRecord>& records) {
  std::vector<Felt> out;
  for (const auto& r : records)
    if (r.in_frak_c) out.push_back(r.c);
  return out;
}

/// (phi(c), psi(c)): the rational expressions that equal c^{q^4} and c^{q^5} when F_1(c) = 0.
inline std::pair<Felt, Felt> phi_identities(const FieldCtx& F, Felt c) {
  if (F.in_subfield(c, 2)) throw DegenerateInputError("c lies in F_{q^2}");
  const auto cq = [&](int j) { return F.frob(c, j); };
  const auto mul = [&](std::initializer_list<Felt> xs) {
    Felt r = kOne;
    for (Felt x : xs) r = F.mul(r, x);
    return r;
  };
  const Felt num = mul({cq(3), cq(1), c}) + c + mul({cq(3), cq(3), cq(2), cq(1)}) + mul({cq(3), cq(2), cq(1)}) +
                   cq(3) + kOne;
  const Felt den = F.mul(mul({cq(3), cq(2), c}), F.mul(cq(3), cq(1)) + kOne);
  if (den.is_zero()) throw DegenerateInputError("zero denominator in the expression for c^{q^4}");
  const Felt phi = F.div(num, den);
  const Felt num5 = mul({phi, cq(2), cq(1)}) + cq(1) + mul({phi, phi, cq(3), cq(2)}) + mul({phi, cq(3), cq(2)}) +
                    phi + kOne;
  const Felt den5 = F.mul(mul({phi, cq(3), cq(1)}), F.mul(phi, cq(2)) + kOne);
  if (den5.is_zero()) throw DegenerateInputError("zero denominator in the expression for c^{q^5}");
  return {phi, F.div(num5, den5)};
}

struct FactorData {
  Felt alpha, beta, gamma;
  Felt A1, A2, A3, A4;
};

/// Sparse polynomial in X, Y, Z keyed by exponents.
using Trivariate = std::map<std::array<int, 3>, Felt>;

inline Trivariate trivariate_mul(const FieldCtx& F, const Trivariate& a, const Trivariate& b) {
  Trivariate r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) r[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += F.mul(ca, cb);
  std::erase_if(r, [](const auto& kv) { return kv.second.is_zero(); });
  return r;
}

/// alpha, beta, gamma and A_1..A_4; only requires F_3(c) != 0.
inline FactorData factor_data_unchecked(const FieldCtx& F, Felt c) {
  const ConjugatePowers P(F, c);
  FactorData d{};
  d.alpha = F.frob(P.sum(tables::kF3), 3);
  if (d.alpha.is_zero()) throw DegenerateInputError("F_3(c) = 0");
  d.A1 = P.sum(tables::kA1);
  d.A2 = P.sum(tables::kA2);
  d.A3 = P.sum(tables::kA3);
  d.A4 = P.sum(tables::kA4);
  d.beta = F.div(d.A3, F.frob(d.alpha, 1));
  d.gamma = F.div(d.A4, d.alpha);
  return d;
}

inline FactorData factor_data(const FieldCtx& F, Felt c) {
  const auto r = frak_c_record(F, c);
  if (!r.lemmas.not_in_Fq2 || !r.f_values[0].is_zero() || !r.f_values[1].is_zero() || r.f_values[2].is_zero())
    throw ParameterError("factorization needs c outside F_{q^2} with F_1(c) = F_2(c) = 0 and F_3(c) != 0");
  return factor_data_unchecked(F, c);
}

/// The seven-term polynomial rbar_3 in X, Y, Z.
inline Trivariate rbar3(const FieldCtx& F, Felt c, const FactorData& d) {
  const Felt f3 = eval_F(F, 3, c);
  Trivariate r;
  const auto add = [&](int x, int y, int z, Felt v) {
    if (!v.is_zero()) r[{x, y, z}] += v;
  };
  add(0, 0, 1, d.A1);
  add(1, 0, 0, F.frob(d.A1, 1));
  add(1, 1, 1, d.A2);
  add(0, 1, 2, d.A3);
  add(1, 2, 2, F.frob(f3, 4));
  add(2, 1, 0, d.A4);
  add(2, 2, 1, F.frob(f3, 3));
  std::erase_if(r, [](const auto& kv) { return kv.second.is_zero(); });
  return r;
}

/// (alpha X + alpha^q Z)(X Y + beta)(Y Z + gamma)
inline Trivariate factored_product(const FieldCtx& F, const FactorData& d) {
  const Trivariate l1{{{1, 0, 0}, d.alpha}, {{0, 0, 1}, F.frob(d.alpha, 1)}};
  Trivariate l2{{{1, 1, 0}, kOne}};
  if (!d.beta.is_zero()) l2[{0, 0, 0}] = d.beta;
  Trivariate l3{{{0, 1, 1}, kOne}};
  if (!d.gamma.is_zero()) l3[{0, 0, 0}] = d.gamma;
  return trivariate_mul(F, trivariate_mul(F, l1, l2), l3);
}

/// rbar_3 == product, without checking the hypotheses beyond F_3(c) != 0.
inline bool factorization_holds(const FieldCtx& F, Felt c) {
  const auto d = factor_data_unchecked(F, c);
  return rbar3(F, c, d) == factored_product(F, d);
}

inline bool verify_factorization(const FieldCtx& F, Felt c) {
  const auto d = factor_data(F, c);
  return rbar3(F, c, d) == factored_product(F, d);
}

}  // namespace evenscat
